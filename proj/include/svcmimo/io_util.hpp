#pragma once

#include <fstream>
#include <string>

namespace svcmimo {

/// Write-temp-then-rename file writer. The temp file is removed if commit()
/// is never reached, so a failed run leaves no partial outputs behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }

  /// Flushes, closes, and renames the temp file onto the target path.
  void commit();

 private:
  std::string path_;
  std::string tmp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

/// FNV-1a 64-bit hash, used for config fingerprints in run manifests.
std::uint64_t fnv1a64(const std::string& data);

}  // namespace svcmimo
