#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskshare/economy.hpp"
#include "riskshare/envelope.hpp"
#include "riskshare/weighting.hpp"

namespace riskshare::io {

/// {"family":"prelec","alpha":0.8} | {"family":"tk","gamma":0.5} |
/// {"family":"heu","gamma":0.5,"kappa":0.5} | {"family":"linear"} |
/// {"family":"mixture","base":{...},"weight":0.25}
Weighting parse_weighting(const nlohmann::json& j);

/// {"rdu":{"weighting":{...},"beta":0.5},"eu":[{"beta":0.5},{"beta":2}],
///  "lambda":[1,1] | "auto_no_side_payment", "w":0}
Economy parse_economy(const nlohmann::json& j);

nlohmann::json weighting_to_json(const Weighting& w);
nlohmann::json envelope_summary(const Envelope& env);

/// CSV with a header row, '.' decimal separator, '\n' line endings, and
/// 12 significant digits; byte-stable across runs.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& values);
    void add_row_raw(const std::vector<std::string>& cells);
    const std::string& str() const { return buffer_; }
    void write_file(const std::string& path) const;

    static std::string format(double v);

private:
    std::string buffer_;
    size_t columns_ = 0;
};

}  // namespace riskshare::io
