#pragma once

#include <optional>
#include <string>

#include "mhdp/spectral_domain.hpp"

namespace mhdp {

/// Writes eigenvalues, coefficient vectors and the domain/grid fingerprints.
void save_basis(const StokesBasis& basis, const std::string& path);

/// Loads a cached basis.  Returns nullopt when the file is absent; throws
/// ConfigMismatch when it was written for another domain or holds fewer than
/// k modes, and Parse on a malformed file.
std::optional<StokesBasis> load_basis(const std::string& path, const DomainSpec& domain, int k);

/// Cache-or-build: loads from `path` when valid, otherwise builds the full
/// spectrum prefix and writes it back.  An empty path disables the cache.
StokesBasis cached_basis(const std::string& path, const DomainSpec& domain, int k);

}  // namespace mhdp
