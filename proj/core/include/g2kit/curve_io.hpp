// curve_io.hpp — plot-ready serialization of correlation curves: CSV with
// header tau,g1_re,g1_im,g2[,g1_err,g2_err] and a JSON array of records
// with the same keys.  Numbers carry 17 significant digits in both formats.
#pragma once

#include <string>

#include "g2kit/regression.hpp"

namespace g2kit::curve_io {

enum class Format { csv, json };

// Accepts "csv" / "json"; ConfigError otherwise.
Format format_from_string(const std::string& name);
std::string to_string(Format f);

// Emit the curve.  The curve must carry g2 (ConfigError otherwise); error
// columns appear exactly when the curve has them.  n_ss is not serialized.
std::string write_csv(const regression::CorrelationCurve& curve);
std::string write_json(const regression::CorrelationCurve& curve);
std::string write(const regression::CorrelationCurve& curve, Format f);

// Parse either format, sniffing JSON by a leading '['.  ConfigError on
// malformed input; the result is validated.
regression::CorrelationCurve read(const std::string& text);

// File variants; ConfigError when the file cannot be opened.
void write_file(const regression::CorrelationCurve& curve, const std::string& path, Format f);
regression::CorrelationCurve read_file(const std::string& path);

} // namespace g2kit::curve_io
