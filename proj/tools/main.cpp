// sevgae command-line front end: data generation, training, sampling,
// evaluation, rendering, and cross-run statistics.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sevgae/checkpoint.hpp"
#include "sevgae/evalsuite.hpp"
#include "sevgae/model.hpp"
#include "sevgae/renderer.hpp"
#include "sevgae/stats.hpp"
#include "sevgae/synthetic.hpp"
#include "sevgae/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sevgae;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SchemaVariant parse_schema(const std::string& s) {
  if (s == "six") return SchemaVariant::Six;
  if (s == "twentyfive") return SchemaVariant::TwentyFive;
  throw CLI::ValidationError("--schema", "must be six or twentyfive");
}

/// Rebuilds the model and optimizer state embedded in a checkpoint.
struct LoadedModel {
  ModelConfig cfg;
  std::unique_ptr<SeVgae> model;
  Adam opt;
};

LoadedModel load_model(const std::string& ckpt) {
  LoadedModel lm;
  lm.cfg = peek_checkpoint_config(ckpt);
  lm.model = std::make_unique<SeVgae>(lm.cfg);
  std::vector<Parameter*> params = lm.model->parameters();
  lm.opt.init(params);
  load_checkpoint(ckpt, params, lm.opt);
  return lm;
}

Eigen::RowVectorXd draw_code(Rng& rng, int dim) {
  Eigen::RowVectorXd z(dim);
  for (int j = 0; j < dim; ++j) z(j) = rng.normal();
  return z;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Minimal PNG writer (truecolor, stored deflate blocks) for scatter output.

std::uint32_t crc32(const std::uint8_t* data, std::size_t len,
                    std::uint32_t crc = 0xffffffffu) {
  static std::uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void png_chunk(std::vector<std::uint8_t>& out, const char* tag,
               const std::vector<std::uint8_t>& data) {
  put_u32(out, std::uint32_t(data.size()));
  std::size_t start = out.size();
  out.insert(out.end(), tag, tag + 4);
  out.insert(out.end(), data.begin(), data.end());
  put_u32(out, crc32(out.data() + start, out.size() - start) ^ 0xffffffffu);
}

void write_png(const std::string& path, int w, int h,
               const std::vector<std::uint8_t>& rgb) {
  std::vector<std::uint8_t> raw;  // filter byte per scanline
  raw.reserve(std::size_t(h) * (std::size_t(w) * 3 + 1));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), rgb.begin() + std::size_t(y) * w * 3,
               rgb.begin() + std::size_t(y + 1) * w * 3);
  }
  // zlib stream with stored deflate blocks.
  std::vector<std::uint8_t> z{0x78, 0x01};
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t len = std::min<std::size_t>(65535, raw.size() - pos);
    bool last = pos + len == raw.size();
    z.push_back(last ? 1 : 0);
    z.push_back(std::uint8_t(len & 0xff));
    z.push_back(std::uint8_t(len >> 8));
    z.push_back(std::uint8_t(~len & 0xff));
    z.push_back(std::uint8_t((~len >> 8) & 0xff));
    z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + len);
    pos += len;
  }
  std::uint32_t a = 1, b = 0;
  for (std::uint8_t c : raw) {
    a = (a + c) % 65521;
    b = (b + a) % 65521;
  }
  put_u32(z, (b << 16) | a);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, std::uint32_t(w));
  put_u32(ihdr, std::uint32_t(h));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit, truecolor
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", z);
  png_chunk(out, "IEND", {});
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
}

void scatter_png(const Eigen::MatrixXd& pts, const std::string& path) {
  const int size = 512, margin = 24;
  std::vector<std::uint8_t> rgb(std::size_t(size) * size * 3, 0xff);
  double x0 = pts.col(0).minCoeff(), x1 = pts.col(0).maxCoeff();
  double y0 = pts.col(1).minCoeff(), y1 = pts.col(1).maxCoeff();
  double sx = x1 > x0 ? (size - 2.0 * margin) / (x1 - x0) : 0.0;
  double sy = y1 > y0 ? (size - 2.0 * margin) / (y1 - y0) : 0.0;
  for (int i = 0; i < pts.rows(); ++i) {
    int cx = int(margin + (pts(i, 0) - x0) * sx + 0.5);
    int cy = size - 1 - int(margin + (pts(i, 1) - y0) * sy + 0.5);
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        if (dx * dx + dy * dy > 5) continue;
        int x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= size || y >= size) continue;
        std::uint8_t* p = &rgb[(std::size_t(y) * size + x) * 3];
        p[0] = 0x1f; p[1] = 0x4e; p[2] = 0x8c;
      }
  }
  write_png(path, size, size, rgb);
}

// ---------------------------------------------------------------------------

json config_as_json(const ModelConfig& cfg) {
  json j = json::object();
  std::istringstream in(to_kv(cfg));
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    trim(key);
    trim(val);
    j[key] = val;
  }
  return j;
}

/// Shell-style `*` matching on the filename component only.
bool wildcard_match(const std::string& pat, const std::string& s) {
  std::size_t p = 0, i = 0, star = std::string::npos, mark = 0;
  while (i < s.size()) {
    if (p < pat.size() && (pat[p] == s[i] || pat[p] == '?')) {
      ++p, ++i;
    } else if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = i;
    } else if (star != std::string::npos) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  fs::path pat(pattern);
  fs::path dir = pat.parent_path().empty() ? fs::path(".") : pat.parent_path();
  std::string name = pat.filename().string();
  std::vector<std::string> out;
  if (name.find('*') == std::string::npos && name.find('?') == std::string::npos) {
    if (fs::exists(pat)) out.push_back(pat.string());
    return out;
  }
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && wildcard_match(name, e.path().filename().string()))
      out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

int run_stats(const std::string& reports_glob, const std::string& groupby,
              const std::string& out_path) {
  std::vector<std::string> files = expand_glob(reports_glob);
  if (files.empty()) throw std::runtime_error("no reports match " + reports_glob);
  // group value -> metric -> samples
  std::map<std::string, std::map<std::string, std::vector<double>>> grouped;
  std::set<std::string> metric_names;
  for (const auto& f : files) {
    json r = json::parse(read_file(f));
    if (!r.contains("config") || !r["config"].contains(groupby))
      throw std::runtime_error(f + ": no config entry for toggle " + groupby);
    std::string gv = r["config"][groupby].get<std::string>();
    for (auto& [k, v] : r.items()) {
      if (!v.is_number()) continue;
      if (k == "n_real" || k == "n_gen" || k == "embedding_seed") continue;
      grouped[gv][k].push_back(v.get<double>());
      metric_names.insert(k);
    }
  }
  json tables;
  tables["groupby"] = groupby;
  json groups = json::array();
  for (const auto& [gv, _] : grouped) groups.push_back(gv);
  tables["groups"] = groups;
  json metrics = json::object();
  for (const auto& m : metric_names) {
    json entry;
    json means = json::object();
    std::vector<std::vector<double>> cols;
    for (const auto& [gv, table] : grouped) {
      auto it = table.find(m);
      if (it == table.end()) continue;
      means[gv] = mean(it->second);
      cols.push_back(it->second);
    }
    entry["mean"] = means;
    if (cols.size() == 2) {
      TTestResult t = two_group_ttest(cols[0], cols[1]);
      entry["t"] = t.t;
      entry["p"] = t.p;
      entry["df"] = t.df;
    } else if (cols.size() > 2) {
      AnovaResult a = one_way_anova(cols);
      entry["F"] = a.F;
      entry["p"] = a.p;
    }
    metrics[m] = entry;
  }
  tables["metrics"] = metrics;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << tables.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"style-based edge-augmented variational graph auto-encoder"};
  app.require_subcommand(1);

  // generate-data
  std::uint64_t gd_seed = 0;
  int gd_count = 1;
  std::string gd_schema = "six", gd_out;
  auto* gd = app.add_subcommand("generate-data", "write a synthetic corpus");
  gd->add_option("--seed", gd_seed, "generator seed");
  gd->add_option("--count", gd_count, "number of graphs")->required();
  gd->add_option("--schema", gd_schema, "six|twentyfive");
  gd->add_option("--out", gd_out, "output JSONL path")->required();

  // train
  std::string tr_config, tr_data, tr_out, tr_resume;
  auto* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--config", tr_config, "key = value config file")->required();
  tr->add_option("--data", tr_data, "corpus JSONL")->required();
  tr->add_option("--out", tr_out, "output directory")->required();
  tr->add_option("--resume", tr_resume, "checkpoint to resume from");

  // sample
  std::string sm_ckpt, sm_out;
  int sm_count = 16;
  std::uint64_t sm_seed = 0;
  auto* sm = app.add_subcommand("sample", "decode prior draws into graphs");
  sm->add_option("--ckpt", sm_ckpt, "checkpoint path")->required();
  sm->add_option("--count", sm_count, "number of samples");
  sm->add_option("--seed", sm_seed, "sampling seed");
  sm->add_option("--out", sm_out, "output JSONL path")->required();

  // interpolate
  std::string ip_ckpt, ip_out;
  int ip_pairs = 4, ip_steps = 8;
  std::uint64_t ip_seed = 0;
  auto* ip = app.add_subcommand("interpolate", "latent interpolation strips");
  ip->add_option("--ckpt", ip_ckpt, "checkpoint path")->required();
  ip->add_option("--pairs", ip_pairs, "number of endpoint pairs");
  ip->add_option("--steps", ip_steps, "steps per pair");
  ip->add_option("--seed", ip_seed, "endpoint seed");
  ip->add_option("--out", ip_out, "output directory")->required();

  // evaluate
  std::string ev_ckpt, ev_data, ev_out;
  auto* ev = app.add_subcommand("evaluate", "sample and score against a corpus");
  ev->add_option("--ckpt", ev_ckpt, "checkpoint path")->required();
  ev->add_option("--data", ev_data, "reference corpus JSONL")->required();
  ev->add_option("--out", ev_out, "report JSON path")->required();

  // project
  std::string pj_ckpt, pj_out;
  int pj_count = 256;
  std::uint64_t pj_seed = 0;
  auto* pj = app.add_subcommand("project", "2-D latent scatter");
  pj->add_option("--ckpt", pj_ckpt, "checkpoint path")->required();
  pj->add_option("--count", pj_count, "number of latent draws");
  pj->add_option("--seed", pj_seed, "draw seed");
  pj->add_option("--out", pj_out, "scatter.(svg|png)")->required();

  // render
  std::string rd_graphs, rd_out;
  auto* rd = app.add_subcommand("render", "floor-plan SVGs for a corpus");
  rd->add_option("--graphs", rd_graphs, "corpus JSONL")->required();
  rd->add_option("--out", rd_out, "output directory")->required();

  // stats
  std::string st_reports, st_groupby, st_out;
  auto* st = app.add_subcommand("stats", "cross-run toggle statistics");
  st->add_option("--reports", st_reports, "report glob, e.g. runs/*.json")->required();
  st->add_option("--groupby", st_groupby, "config toggle to group by")->required();
  st->add_option("--out", st_out, "tables JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gd) {
      GeneratorConfig cfg;
      cfg.seed = gd_seed;
      cfg.count = gd_count;
      cfg.schema = parse_schema(gd_schema);
      write_corpus(generate_corpus(cfg), gd_out);
    } else if (*tr) {
      ModelConfig cfg = model_config_from_kv(read_file(tr_config));
      std::vector<Aamg> corpus = read_corpus(tr_data);
      fs::create_directories(tr_out);
      Trainer trainer(cfg, std::move(corpus));
      if (!tr_resume.empty()) trainer.resume(tr_resume);
      std::vector<EpochStats> stats = trainer.run(tr_out);
      if (!stats.empty()) {
        const EpochStats& last = stats.back();
        std::cout << "epoch " << last.epoch + 1 << " train " << last.train_loss
                  << " val " << last.val_loss << "\n";
      }
    } else if (*sm) {
      LoadedModel lm = load_model(sm_ckpt);
      SampleResult res = sample_graphs(*lm.model, sm_count, sm_seed);
      write_corpus(res.graphs, sm_out);
    } else if (*ip) {
      LoadedModel lm = load_model(ip_ckpt);
      fs::create_directories(ip_out);
      Rng rng(ip_seed);
      for (int i = 0; i < ip_pairs; ++i) {
        Eigen::RowVectorXd a = draw_code(rng, lm.cfg.z_dim);
        Eigen::RowVectorXd b = draw_code(rng, lm.cfg.z_dim);
        std::vector<Aamg> strip = interpolate_codes(*lm.model, a, b, ip_steps);
        fs::path base = fs::path(ip_out) / ("pair-" + std::to_string(i));
        emit_interpolation_strip(strip, base.string() + ".svg");
        write_corpus(strip, base.string() + ".jsonl");
      }
    } else if (*ev) {
      LoadedModel lm = load_model(ev_ckpt);
      std::vector<Aamg> real = read_corpus(ev_data);
      SampleResult res = sample_graphs(*lm.model, int(real.size()), lm.cfg.seed);
      char fp[32];
      std::snprintf(fp, sizeof fp, "%016llx",
                    (unsigned long long)fnv1a(to_kv(lm.cfg)));
      EvalReport rep = evaluate_sets(real, res.graphs, EmbeddingConfig{}, fp);
      json j = json::parse(rep.to_json());
      j["config"] = config_as_json(lm.cfg);
      std::ofstream out(ev_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + ev_out);
      out << j.dump(2) << "\n";
    } else if (*pj) {
      LoadedModel lm = load_model(pj_ckpt);
      SampleResult res = sample_graphs(*lm.model, pj_count, pj_seed);
      if (pj_out.size() >= 4 && pj_out.substr(pj_out.size() - 4) == ".png") {
        fs::path tmp = fs::path(pj_out).replace_extension(".scatter-tmp.svg");
        Eigen::MatrixXd pts = project_latents(res.codes, tmp.string());
        fs::remove(tmp);
        scatter_png(pts, pj_out);
      } else {
        project_latents(res.codes, pj_out);
      }
    } else if (*rd) {
      std::vector<Aamg> graphs = read_corpus(rd_graphs);
      fs::create_directories(rd_out);
      for (const Aamg& g : graphs) {
        LabelSchema schema = LabelSchema::make(g.schema);
        FloorPlanLayout layout = graph_to_plan(g);
        fs::path path = fs::path(rd_out) / (g.id + ".svg");
        emit_plan_svg(layout, schema, path.string());
      }
    } else if (*st) {
      return run_stats(st_reports, st_groupby, st_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
