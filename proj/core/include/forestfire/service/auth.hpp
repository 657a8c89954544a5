#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestfire/crypto/bytes.hpp"

namespace forestfire::service {

enum class Role : std::uint8_t { viewer, operator_, admin };

std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view text);
// admin ⊇ operator ⊇ viewer
bool permits(Role held, Role required);

inline constexpr std::uint32_t kDefaultPbkdf2Iterations = 100'000;

// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>"
std::string hash_password(std::string_view password, std::uint32_t iterations = kDefaultPbkdf2Iterations);
// False for a wrong password or a malformed hash string.
bool verify_password(std::string_view password, std::string_view encoded);

struct User {
  std::string username;
  Role role = Role::viewer;
  std::string password_hash;
};

class UserStore {
 public:
  // Replaces an existing user of the same name.
  void put(User user);
  // Runs the hash comparison even for unknown names.
  std::optional<User> authenticate(std::string_view username, std::string_view password) const;
  std::size_t size() const { return users_.size(); }

 private:
  std::map<std::string, User, std::less<>> users_;
};

using SystemClock = std::chrono::system_clock;

struct Principal {
  std::string subject;
  Role role = Role::viewer;
  SystemClock::time_point expiry;
};

struct IssuedToken {
  std::string token;  // 64 hex characters, shown once
  Principal principal;
};

// Bearer tokens held in memory as SHA-256 digests only.
class TokenStore {
 public:
  using Clock = std::function<SystemClock::time_point()>;

  explicit TokenStore(Clock clock = {});

  IssuedToken issue(std::string subject, Role role, std::chrono::seconds ttl);
  // nullopt for unknown or expired tokens.
  std::optional<Principal> authenticate(std::string_view token) const;
  void revoke(std::string_view token);

  std::size_t size() const;
  // Stored digests, for inspection.
  std::vector<crypto::Digest> digests() const;
  SystemClock::time_point now() const { return clock_(); }

 private:
  Clock clock_;
  mutable std::mutex mu_;
  mutable std::map<crypto::Digest, Principal> tokens_;
};

}  // namespace forestfire::service
