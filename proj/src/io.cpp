#include "gsde/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "gsde/errors.hpp"
#include "gsde/format.hpp"

namespace gsde::io {

namespace {

std::string join_ids(const std::set<std::string>& ids) {
  std::string out;
  for (const std::string& id : ids) {
    if (!out.empty()) out += ";";
    out += id;
  }
  return out;
}

}  // namespace

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  GSDE_REQUIRE(GsdeError, static_cast<bool>(out),
               "cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  GSDE_REQUIRE(GsdeError, static_cast<bool>(out),
               "short write to '" + path.string() + "'");
}

std::string driver_batch_csv(const std::vector<DriverPath>& paths) {
  std::string out = "path_index,k,t_k,B_k,mu_k,qv_k\n";
  for (const DriverPath& p : paths) {
    const std::string idx = format_u64(p.provenance.path_index);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      out += idx;
      out += ",";
      out += format_u64(k);
      out += ",";
      out += format_double(p.grid->points[k]);
      out += ",";
      out += format_double(p.values[k]);
      out += ",";
      if (k < p.vol_record.size()) out += format_double(p.vol_record[k]);
      out += ",";
      out += format_double(p.qv_pathwise[k]);
      out += "\n";
    }
  }
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "path_index,n,epsilon,cauchy_gap,error_bound\n";
  for (const ConvergenceRow& r : rows) {
    out += format_u64(r.path_index);
    out += ",";
    out += format_u64(r.n);
    out += ",";
    out += format_double(r.epsilon);
    out += ",";
    if (r.has_gap) out += format_double(r.cauchy_gap);
    out += ",";
    out += format_double(r.error_bound);
    out += "\n";
  }
  return out;
}

std::string breakdown_csv(const GEstimate& g) {
  std::string out = "measure_id,mean,stderr,n\n";
  for (const Estimate& e : g.per_measure) {
    out += e.measure_id;
    out += ",";
    out += format_double(e.mean);
    out += ",";
    out += format_double(e.std_error);
    out += ",";
    out += format_u64(e.n);
    out += "\n";
  }
  return out;
}

std::string table_csv(const UniversalSolutionTable& table,
                      const std::vector<DriverPath>& paths) {
  std::string out = "path_id,k,t_k,X_k,provenance\n";
  for (const auto& [key, entry] : table.entries) {
    const std::string prov = join_ids(entry.provenance);
    for (std::size_t k = 0; k < entry.solution.values.size(); ++k) {
      out += key;
      out += ",";
      out += format_u64(k);
      out += ",";
      out += format_double(entry.solution.grid->points[k]);
      out += ",";
      out += format_double(entry.solution.values[k]);
      out += ",";
      out += prov;
      out += "\n";
    }
  }
  for (const std::string& key : table.exceptional) {
    const DriverPath* path = nullptr;
    for (const DriverPath& p : paths)
      if (p.provenance.key() == key) {
        path = &p;
        break;
      }
    if (!path) continue;
    for (std::size_t k = 0; k < path->values.size(); ++k) {
      out += key;
      out += ",";
      out += format_u64(k);
      out += ",";
      out += format_double(path->grid->points[k]);
      out += ",";
      out += format_double(0.0);
      out += ",";
      out += "\n";
    }
  }
  return out;
}

nlohmann::ordered_json gestimate_json(const GEstimate& g) {
  nlohmann::ordered_json j;
  j["sup_value"] = g.sup_value;
  j["argmax_id"] = g.argmax_id;
  j["inf_value"] = g.inf_value;
  j["argmin_id"] = g.argmin_id;
  j["per_measure"] = nlohmann::ordered_json::array();
  for (const Estimate& e : g.per_measure) {
    nlohmann::ordered_json row;
    row["measure_id"] = e.measure_id;
    row["mean"] = e.mean;
    row["stderr"] = e.std_error;
    row["n"] = e.n;
    j["per_measure"].push_back(std::move(row));
  }
  return j;
}

namespace {

nlohmann::ordered_json compat_rows_json(const std::vector<CompatRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CompatRow& r : rows) {
    nlohmann::ordered_json row;
    row["measure_p"] = r.measure_p;
    row["measure_q"] = r.measure_q;
    row["path_id"] = r.path_id;
    row["deviation"] = r.deviation;
    arr.push_back(std::move(row));
  }
  return arr;
}

}  // namespace

nlohmann::ordered_json compat_json(const CompatibilityReport& report) {
  nlohmann::ordered_json j;
  j["pass"] = report.pass;
  j["max_deviation"] = report.max_deviation;
  j["pair_count"] = report.pairs.size();
  j["pairs"] = compat_rows_json(report.pairs);
  return j;
}

nlohmann::ordered_json average_consistency_json(
    const AverageConsistencyReport& report) {
  nlohmann::ordered_json j;
  j["average_id"] = report.average_id;
  j["pass"] = report.compat.pass;
  j["max_deviation"] = report.compat.max_deviation;
  j["left_count"] = report.left_count;
  j["right_count"] = report.right_count;
  j["pairs"] = compat_rows_json(report.compat.pairs);
  return j;
}

nlohmann::ordered_json table_summary_json(const UniversalSolutionTable& table) {
  nlohmann::ordered_json j;
  j["entry_count"] = table.entries.size();
  j["exceptional_count"] = table.exceptional.size();
  j["conflict_count"] = table.conflicts.size();
  std::map<std::string, std::size_t> histogram;
  for (const auto& [key, entry] : table.entries)
    ++histogram[join_ids(entry.provenance)];
  nlohmann::ordered_json hist;
  for (const auto& [prov, count] : histogram) hist[prov] = count;
  j["provenance_histogram"] = std::move(hist);
  j["exceptional"] = table.exceptional;
  return j;
}

std::string coeff_class_name(CoeffClass tag) {
  switch (tag) {
    case CoeffClass::Lipschitz:
      return "lipschitz";
    case CoeffClass::YamadaWatanabe:
      return "yamada_watanabe";
    case CoeffClass::Monotone:
      return "monotone";
    case CoeffClass::StochVol:
      return "stochvol";
  }
  return "?";
}

nlohmann::ordered_json regularity_json(const RegularityReport& report) {
  nlohmann::ordered_json j;
  j["class"] = coeff_class_name(report.class_tag);
  j["pass"] = report.pass;
  j["sample_count"] = report.sample_count;
  j["violations"] = report.violations;
  nlohmann::ordered_json constants;
  for (const auto& [name, value] : report.constants) constants[name] = value;
  j["constants"] = std::move(constants);
  nlohmann::ordered_json sub;
  for (const auto& [name, ok] : report.sub_verdicts) sub[name] = ok;
  j["sub_verdicts"] = std::move(sub);
  if (report.worst_example.empty())
    j["worst_example"] = nullptr;
  else
    j["worst_example"] = report.worst_example;
  return j;
}

nlohmann::ordered_json manifest_json(const std::string& command,
                                     const std::string& config_hash,
                                     std::uint64_t master_seed,
                                     const std::vector<ManifestOutput>& outputs) {
  nlohmann::ordered_json j;
  j["tool"] = "gsde";
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["master_seed"] = master_seed;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const ManifestOutput& o : outputs) {
    nlohmann::ordered_json row;
    row["file"] = o.file;
    row["format"] = o.format;
    row["format_version"] = o.format_version;
    j["outputs"].push_back(std::move(row));
  }
  return j;
}

}  // namespace gsde::io
