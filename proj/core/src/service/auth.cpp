#include "forestfire/service/auth.hpp"

#include <charconv>

#include <openssl/evp.h>

#include "forestfire/crypto/random.hpp"
#include "forestfire/crypto/sha256.hpp"
#include "forestfire/error.hpp"

namespace forestfire::service {

namespace {

constexpr std::string_view kScheme = "pbkdf2-sha256";
constexpr std::size_t kSaltSize = 16;
constexpr std::size_t kHashSize = 32;

crypto::Bytes pbkdf2(std::string_view password, crypto::ByteView salt, std::uint32_t iterations) {
  crypto::Bytes out(kHashSize);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    throw CryptoError("PBKDF2 failed");
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  for (std::size_t pos = 0;;) {
    const auto next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) return parts;
    pos = next + 1;
  }
}

// Compared against when the user does not exist.
const std::string& dummy_hash() {
  static const std::string h = hash_password("", kDefaultPbkdf2Iterations);
  return h;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::viewer: return "viewer";
    case Role::operator_: return "operator";
    case Role::admin: return "admin";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "viewer") return Role::viewer;
  if (text == "operator") return Role::operator_;
  if (text == "admin") return Role::admin;
  return std::nullopt;
}

bool permits(Role held, Role required) { return static_cast<int>(held) >= static_cast<int>(required); }

std::string hash_password(std::string_view password, std::uint32_t iterations) {
  if (iterations == 0) throw std::invalid_argument("PBKDF2 iteration count must be positive");
  crypto::SystemRandom rng;
  const auto salt = rng.draw<kSaltSize>();
  const auto hash = pbkdf2(password, salt, iterations);
  return std::string(kScheme) + "$" + std::to_string(iterations) + "$" + crypto::to_hex(salt) + "$" +
         crypto::to_hex(hash);
}

bool verify_password(std::string_view password, std::string_view encoded) {
  const auto parts = split(encoded, '$');
  if (parts.size() != 4 || parts[0] != kScheme) return false;
  std::uint32_t iterations = 0;
  const auto [end, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), iterations);
  if (ec != std::errc{} || end != parts[1].data() + parts[1].size() || iterations == 0) return false;
  try {
    const auto salt = crypto::from_hex(parts[2]);
    const auto expected = crypto::from_hex(parts[3]);
    if (expected.size() != kHashSize) return false;
    return crypto::constant_time_equal(pbkdf2(password, salt, iterations), expected);
  } catch (const std::exception&) {
    return false;
  }
}

void UserStore::put(User user) {
  auto name = user.username;
  users_.insert_or_assign(std::move(name), std::move(user));
}

std::optional<User> UserStore::authenticate(std::string_view username, std::string_view password) const {
  const auto it = users_.find(username);
  if (it == users_.end()) {
    verify_password(password, dummy_hash());
    return std::nullopt;
  }
  if (!verify_password(password, it->second.password_hash)) return std::nullopt;
  return it->second;
}

TokenStore::TokenStore(Clock clock) : clock_(std::move(clock)) {
  if (!clock_) clock_ = [] { return SystemClock::now(); };
}

IssuedToken TokenStore::issue(std::string subject, Role role, std::chrono::seconds ttl) {
  if (ttl <= std::chrono::seconds::zero()) throw std::invalid_argument("token ttl must be positive");
  crypto::SystemRandom rng;
  const auto raw = rng.draw<32>();
  IssuedToken out{crypto::to_hex(raw), Principal{std::move(subject), role, clock_() + ttl}};
  const std::lock_guard lock(mu_);
  tokens_[crypto::sha256(crypto::as_bytes(out.token))] = out.principal;
  return out;
}

std::optional<Principal> TokenStore::authenticate(std::string_view token) const {
  const auto digest = crypto::sha256(crypto::as_bytes(token));
  const auto now = clock_();
  const std::lock_guard lock(mu_);
  std::erase_if(tokens_, [&](const auto& kv) { return kv.second.expiry <= now; });
  const auto it = tokens_.find(digest);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

void TokenStore::revoke(std::string_view token) {
  const auto digest = crypto::sha256(crypto::as_bytes(token));
  const std::lock_guard lock(mu_);
  tokens_.erase(digest);
}

std::size_t TokenStore::size() const {
  const std::lock_guard lock(mu_);
  return tokens_.size();
}

std::vector<crypto::Digest> TokenStore::digests() const {
  const std::lock_guard lock(mu_);
  std::vector<crypto::Digest> out;
  for (const auto& [d, p] : tokens_) out.push_back(d);
  return out;
}

}  // namespace forestfire::service
