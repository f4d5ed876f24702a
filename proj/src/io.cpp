#include "gaussopt/io.hpp"

#include <fstream>
#include <sstream>

namespace gaussopt {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json state_to_json(const DensityMatrix& rho) {
  ordered_json j;
  j["mode_dims"] = rho.space().mode_dims;
  auto rows = ordered_json::array();
  for (int i = 0; i < rho.dim(); ++i) {
    auto row = ordered_json::array();
    for (int k = 0; k < rho.dim(); ++k) {
      cxd v = rho.mat()(i, k);
      row.push_back({v.real(), v.imag()});
    }
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

DensityMatrix state_from_json(const json& j, const GlobalConfig& cfg) {
  if (!j.contains("mode_dims") || !j.contains("matrix"))
    throw DomainError("state_from_json: missing mode_dims or matrix");
  FockSpace space(j.at("mode_dims").get<std::vector<int>>());
  const auto& rows = j.at("matrix");
  const int d = space.total_dim();
  if (static_cast<int>(rows.size()) != d)
    throw DomainError("state_from_json: matrix row count mismatch");
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<int>(row.size()) != d)
      throw DomainError("state_from_json: matrix column count mismatch");
    for (int k = 0; k < d; ++k) {
      const auto& cell = row.at(k);
      if (cell.size() != 2)
        throw DomainError("state_from_json: entries must be [re, im]");
      m(i, k) = cxd(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  DensityMatrix rho(space, std::move(m), cfg);  // hermiticity/trace/diagonal
  rho.validate_psd(cfg);
  return rho;
}

ordered_json prob_to_json(const ProbVector& p) {
  ordered_json j;
  j["weights"] = p.weights;
  return j;
}

ProbVector prob_from_json(const json& j, const GlobalConfig& cfg) {
  if (j.is_array()) return ProbVector(j.get<std::vector<double>>(), cfg);
  if (j.contains("weights"))
    return ProbVector(j.at("weights").get<std::vector<double>>(), cfg);
  throw DomainError("prob_from_json: expected array or {weights:[...]}");
}

namespace {

ChannelKind kind_from_name(const std::string& name) {
  for (ChannelKind k :
       {ChannelKind::AttenuatorQL, ChannelKind::AmplifierQL,
        ChannelKind::AttenuatorThermal, ChannelKind::AmplifierThermal,
        ChannelKind::BeamSplitterReduce, ChannelKind::HeatSemigroup,
        ChannelKind::Transpose, ChannelKind::Dual, ChannelKind::Complementary})
    if (name == channel_kind_name(k)) return k;
  throw DomainError("unknown channel kind: " + name);
}

ordered_json cutoffs_to_json(const CutoffSpec& c) {
  ordered_json j;
  j["in"] = c.in.mode_dims;
  j["out"] = c.out.mode_dims;
  j["guard_in"] = c.guard_in.mode_dims;
  j["guard_out"] = c.guard_out.mode_dims;
  return j;
}

}  // namespace

ordered_json channel_to_json(const ChannelRep& c) {
  ordered_json j;
  j["kind"] = channel_kind_name(c.kind);
  j["param"] = c.param;
  j["env_energy"] = c.env_energy;
  j["quad_order"] = c.quad_order;
  j["copies"] = c.copies;
  j["cutoffs"] = cutoffs_to_json(c.cutoffs);
  if (c.inner) j["inner"] = channel_to_json(*c.inner);
  return j;
}

ChannelRep channel_from_json(const json& j, const GlobalConfig& cfg) {
  ChannelKind kind = kind_from_name(j.at("kind").get<std::string>());
  double param = j.value("param", 1.0);
  double env = j.value("env_energy", 0.0);
  int quad_order = j.value("quad_order", 15);
  int copies = j.value("copies", 1);
  const auto& cut = j.at("cutoffs");
  auto in_dims = cut.at("in").get<std::vector<int>>();
  auto out_dims = cut.at("out").get<std::vector<int>>();
  auto gin_dims = cut.at("guard_in").get<std::vector<int>>();
  auto gout_dims = cut.at("guard_out").get<std::vector<int>>();
  int per_copy_in = in_dims.at(0);
  int per_copy_out = out_dims.at(0);
  int per_copy_gout = gout_dims.at(0);

  ChannelRep base;
  switch (kind) {
    case ChannelKind::AttenuatorQL:
      base = kraus_attenuator_ql(param, per_copy_in, cfg);
      break;
    case ChannelKind::AmplifierQL:
      base = kraus_amplifier_ql(param, per_copy_in, per_copy_gout, cfg);
      break;
    case ChannelKind::AttenuatorThermal:
    case ChannelKind::AmplifierThermal:
      base = thermal_channel(kind, param, env, per_copy_in, per_copy_gout, cfg);
      break;
    case ChannelKind::HeatSemigroup:
      base = heat_semigroup(param, per_copy_in, quad_order, cfg, per_copy_gout,
                            per_copy_out);
      break;
    case ChannelKind::Transpose:
      base = transpose_channel(per_copy_in);
      break;
    case ChannelKind::BeamSplitterReduce: {
      if (in_dims.size() != 2)
        throw DomainError("channel_from_json: beam splitter needs two input modes");
      base = beam_splitter_reduce(param, in_dims[0], in_dims[1], per_copy_out,
                                  {gin_dims[0], gin_dims[1]}, cfg);
      break;
    }
    case ChannelKind::Dual:
      base = dual_channel(channel_from_json(j.at("inner"), cfg));
      break;
    case ChannelKind::Complementary:
      base = complementary_ql(channel_from_json(j.at("inner"), cfg));
      break;
  }
  if (copies > 1) base = tensor_power(base, copies);
  return base;
}

ordered_json report_to_json(const VerificationReport& r) {
  ordered_json j;
  j["theorem_id"] = r.theorem_id;
  j["params"] = r.params;
  j["gap"] = r.gap;
  j["tolerance"] = r.tolerance;
  j["leakage"] = r.leakage;
  j["trials"] = r.trials;
  j["status"] = status_name(r.status);
  j["seed"] = r.seed;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write file: " + path);
  out << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) ss << ',';
    ss << header[i];
  }
  ss << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) ss << ',';
      ss << row[i];
    }
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

}  // namespace gaussopt
