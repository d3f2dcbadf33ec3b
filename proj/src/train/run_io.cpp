#include "amr/train/run_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "amr/common/error.hpp"

namespace amr::train {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw IoError("cannot write " + file.string());
  os << text;
  if (!os) throw IoError("failed writing " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
  std::istringstream in(read_text(file));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw FormatError(FormatFault::malformed, file.string() + ": empty CSV");
  return rows;
}

template <typename T>
T parse_num(const std::string& s, const fs::path& file) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw FormatError(FormatFault::malformed, file.string() + ": bad number '" + s + "'");
  return v;
}

void expect_width(const std::vector<std::string>& row, std::size_t n, const fs::path& file) {
  if (row.size() != n) throw FormatError(FormatFault::malformed, file.string() + ": expected " + std::to_string(n) + " columns");
}

}  // namespace

void write_history(const fs::path& file, const History& h) {
  std::string out = "epoch,train_loss,val_loss,val_accuracy,train_accuracy\n";
  for (const auto& e : h.epochs) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," + format_double(e.val_loss) + "," +
           format_double(e.val_accuracy) + "," + (e.train_accuracy ? format_double(*e.train_accuracy) : "") + "\n";
  }
  write_text(file, out);
}

void write_report(const fs::path& dir, const EvalReport& r) {
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kClasses; ++c) correct += r.confusion[c][c];
  write_text(dir / files::kSummary, "n_test,correct,overall_accuracy\n" + std::to_string(r.n_test) + "," +
                                        std::to_string(correct) + "," + format_double(r.overall_accuracy) + "\n");
  std::string snr = "snr_db,n,correct,accuracy\n";
  for (const auto& [s, n] : r.per_snr_count) {
    const double acc = r.per_snr.at(s);
    const auto hits = static_cast<std::size_t>(std::llround(acc * static_cast<double>(n)));
    snr += std::to_string(s) + "," + std::to_string(n) + "," + std::to_string(hits) + "," + format_double(acc) + "\n";
  }
  write_text(dir / files::kPerSnr, snr);
  std::string mod = "modulation,class_index,n,correct,accuracy\n";
  for (const auto& [m, n] : r.per_modulation_count) {
    const auto c = static_cast<std::size_t>(m);
    mod += std::string(sigsynth::name(m)) + "," + std::to_string(c) + "," + std::to_string(n) + "," +
           std::to_string(r.confusion[c][c]) + "," + format_double(r.per_modulation.at(m)) + "\n";
  }
  write_text(dir / files::kPerModulation, mod);
  std::string conf = "true\\pred";
  for (auto m : sigsynth::kAllModulations) conf += "," + std::string(sigsynth::name(m));
  conf += "\n";
  for (std::size_t t = 0; t < kClasses; ++t) {
    conf += std::string(sigsynth::name(sigsynth::kAllModulations[t]));
    for (std::size_t p = 0; p < kClasses; ++p) conf += "," + std::to_string(r.confusion[t][p]);
    conf += "\n";
  }
  write_text(dir / files::kConfusion, conf);
}

EvalReport read_report(const fs::path& dir) {
  EvalReport r;
  {
    const fs::path f = dir / files::kSummary;
    const auto rows = read_csv(f);
    if (rows.size() != 2) throw FormatError(FormatFault::malformed, f.string() + ": expected one data row");
    expect_width(rows[1], 3, f);
    r.n_test = parse_num<std::size_t>(rows[1][0], f);
    const auto correct = parse_num<std::size_t>(rows[1][1], f);
    if (r.n_test == 0) throw FormatError(FormatFault::malformed, f.string() + ": n_test is zero");
    r.overall_accuracy = static_cast<double>(correct) / static_cast<double>(r.n_test);
  }
  {
    const fs::path f = dir / files::kPerSnr;
    const auto rows = read_csv(f);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      expect_width(rows[i], 4, f);
      const int snr = parse_num<int>(rows[i][0], f);
      const auto n = parse_num<std::size_t>(rows[i][1], f);
      const auto hits = parse_num<std::size_t>(rows[i][2], f);
      r.per_snr_count[snr] = n;
      r.per_snr[snr] = static_cast<double>(hits) / static_cast<double>(n);
    }
  }
  {
    const fs::path f = dir / files::kPerModulation;
    const auto rows = read_csv(f);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      expect_width(rows[i], 5, f);
      const auto idx = parse_num<std::size_t>(rows[i][1], f);
      const auto m = sigsynth::modulation_from_index(idx);
      if (!m) throw FormatError(FormatFault::malformed, f.string() + ": bad class index");
      const auto n = parse_num<std::size_t>(rows[i][2], f);
      const auto hits = parse_num<std::size_t>(rows[i][3], f);
      r.per_modulation_count[*m] = n;
      r.per_modulation[*m] = static_cast<double>(hits) / static_cast<double>(n);
    }
  }
  {
    const fs::path f = dir / files::kConfusion;
    const auto rows = read_csv(f);
    if (rows.size() != kClasses + 1) throw FormatError(FormatFault::malformed, f.string() + ": expected 11 rows");
    for (std::size_t t = 0; t < kClasses; ++t) {
      expect_width(rows[t + 1], kClasses + 1, f);
      for (std::size_t p = 0; p < kClasses; ++p) r.confusion[t][p] = parse_num<std::uint64_t>(rows[t + 1][p + 1], f);
    }
  }
  return r;
}

void write_curriculum(const fs::path& file, const std::vector<CurriculumResult>& results) {
  std::string out = "scenario,lo,hi,acc_low,acc_high,acc_overall,stop_epoch\n";
  for (const auto& r : results) {
    out += r.scenario.label() + "," + std::to_string(r.scenario.lo) + "," + std::to_string(r.scenario.hi) + "," +
           format_double(r.accuracy.acc_low) + "," + format_double(r.accuracy.acc_high) + "," +
           format_double(r.accuracy.acc_overall) + "," + std::to_string(r.history.stop_epoch()) + "\n";
  }
  write_text(file, out);
}

std::vector<CurriculumRow> read_curriculum(const fs::path& file) {
  std::vector<CurriculumRow> out;
  // Labels contain a comma ("[-2,18]"), so rebuild rows from the raw lines.
  std::istringstream in(read_text(file));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto close = line.find(']');
    if (line.empty() || line[0] != '[' || close == std::string::npos)
      throw FormatError(FormatFault::malformed, file.string() + ": bad scenario label");
    CurriculumRow row;
    row.label = line.substr(0, close + 1);
    std::vector<std::string> cells;
    std::istringstream ls(line.substr(close + 2));
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    expect_width(cells, 6, file);
    row.lo = parse_num<int>(cells[0], file);
    row.hi = parse_num<int>(cells[1], file);
    row.acc_low = parse_num<double>(cells[2], file);
    row.acc_high = parse_num<double>(cells[3], file);
    row.acc_overall = parse_num<double>(cells[4], file);
    row.stop_epoch = parse_num<std::size_t>(cells[5], file);
    out.push_back(row);
  }
  return out;
}

RunRecord load_run(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a run directory: " + dir.string());
  RunRecord rec;
  rec.dir = dir;
  try {
    rec.manifest = nlohmann::json::parse(read_text(dir / files::kManifest));
    rec.model_id = rec.manifest.at("model_id").get<std::string>();
    rec.base_model = rec.manifest.at("base_model").get<std::string>();
    rec.augmented = rec.manifest.at("augmented").get<bool>();
    rec.param_count = rec.manifest.at("param_count").get<std::size_t>();
    rec.corpus_hash = rec.manifest.at("corpus_hash").get<std::string>();
    rec.stop_epoch = rec.manifest.value("stop_epoch", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatFault::malformed, (dir / files::kManifest).string() + ": " + e.what());
  }
  if (fs::exists(dir / files::kSummary)) rec.report = read_report(dir);
  if (fs::exists(dir / files::kCurriculum)) rec.curriculum = read_curriculum(dir / files::kCurriculum);
  return rec;
}

}  // namespace amr::train
