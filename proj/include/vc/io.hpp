#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vc/chaos.hpp"

namespace vc {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Fixed-format double for CSV bodies: enough digits to round-trip, and the
// same bytes on every run and thread count.
std::string fmt17(double x);

// Parses text as JSON, translating parse errors into ConfigError.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

// Rejects objects with keys outside required + optional and objects missing
// a required key; config typos must fail loudly.
void check_keys(const nlohmann::json& obj, const std::string& ctx,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional);

KernelSpec parse_kernel(const nlohmann::json& j, const std::string& ctx);
DriftSpec parse_drift(const nlohmann::json& j);
DiffusionSpec parse_diffusion(const nlohmann::json& j);
InitSampler parse_init(const nlohmann::json& j);
TimeGrid parse_grid(const nlohmann::json& j);
PicardConfig parse_picard(const nlohmann::json& j);
// Reads the kernel/coefficient/init block shared by every config that
// describes a system; key presence is the caller's responsibility.
SystemSpec parse_system(const nlohmann::json& j);

// Full experiment config with a versioned schema; unknown keys are errors.
ExperimentConfig parse_experiment_config(const std::string& json_text);

nlohmann::json rate_fit_json(const RateFit& f);
std::string report_to_json(const ChaosReport& rep);
std::string errors_csv(const ChaosReport& rep);
std::string rates_csv(const ChaosReport& rep);

std::string gc_to_json(const GCBenchmark& gc);
std::string gc_to_csv(const GCBenchmark& gc);

std::string picard_to_json(const PicardResult& res, int M_law);
std::string law_flow_csv(const LawFlow& law);

std::string measure_csv(const EmpiricalMeasure& m);
// Path matrix: one row per path, node-major column blocks for d > 1, with a
// small header describing grid, seed and specs.
std::string ensemble_csv(const PathEnsemble& ens);

// Timestamped append-only log; the only output that carries wall-clock data.
class RunLog {
public:
    explicit RunLog(const std::string& path);
    void line(const std::string& msg);

private:
    std::ofstream out_;
};

}  // namespace vc
