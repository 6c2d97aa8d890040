#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

enum class Errc {
  invalid_params,
  odd_cut_count,
  stage_out_of_range,
  depth_too_shallow,
  cardinality_cap,
  divisibility_failed,
  coverage_too_small,
  usage_error,
  parse_error,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rankone
