#pragma once

#include <json.hpp>

#include "otg/mtw.hpp"
#include "otg/transport.hpp"

namespace otg {

using Json = nlohmann::ordered_json;

Json to_json(const Vec& v);
Json to_json(const Mat& m);            // flattened row-major with shape
Json to_json(const Tensor3& t);        // flattened row-major with shape
Json to_json(const Tensor4& t);
Json to_json(const Certificate& cert);
Json to_json(const TransportPlan& plan, bool dense);
Json to_json(const TransportMap& map);
Json to_json(const PotentialPair& pp);
Json to_json(const InDomainResult& r);

// Envelope shared by every CLI command:
// {version, command, inputs, outputs, provenance:{seed, tolerances}, timing_ms}
class Report {
  public:
    Report(std::string command, std::uint64_t seed);
    Json& inputs() { return j_["inputs"]; }
    Json& outputs() { return j_["outputs"]; }
    void tolerance(const std::string& name, double value);
    void finish(bool with_timing, double elapsed_ms);
    const Json& json() const { return j_; }

  private:
    Json j_;
};

}  // namespace otg
