#pragma once

#include <iosfwd>
#include <string>

#include "fcsmpc/runlog.hpp"

namespace fcsmpc {

/// Column layout of the on-disk run log. Real values are written with 9
/// significant digits, which round-trips the quantized in-memory log exactly;
/// levels are written as plain integers.
inline constexpr const char* kRunLogHeader =
    "t_s,ia_A,ib_A,ic_A,ua_lvl,ub_lvl,uc_lvl,vd1_V,vd2_V,vd3_V,iaref_A,ibref_A,icref_A";

void write_runlog_csv(const RunLog& log, std::ostream& os);
void write_runlog_csv(const RunLog& log, const std::string& path);

/// Reads a log written by write_runlog_csv. The sample rate is recovered from
/// the time column. Raises std::runtime_error on malformed content.
[[nodiscard]] RunLog read_runlog_csv(std::istream& is);
[[nodiscard]] RunLog read_runlog_csv(const std::string& path);

}  // namespace fcsmpc
