#include "pat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pat/io.hpp"

namespace pat {

double psnr(const Image& u, const Image& gt) {
  if (!u.same_shape(gt)) throw std::invalid_argument("psnr: shape mismatch");
  const double range = max_value(gt.v) - min_value(gt.v);
  if (range <= 0.0) throw std::invalid_argument("psnr: constant ground truth has no range");
  double mse = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    const double d = u.v[i] - gt.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(u.v.size());
  if (mse == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(range * range / mse);
}

double roc_auc(const std::vector<double>& scores, const std::vector<double>& gt) {
  if (scores.size() != gt.size()) throw std::invalid_argument("roc_auc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    // midrank over the tie group
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (gt[order[k]] > 0.5) rank_sum_pos += midrank;
    i = j;
  }
  for (double g : gt) n_pos += g > 0.5 ? 1 : 0;
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: ground truth must contain both classes");
  const double u_stat = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u_stat / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double roc_auc(const Image& scores, const Image& gt) {
  if (!scores.same_shape(gt)) throw std::invalid_argument("roc_auc: shape mismatch");
  return roc_auc(scores.v, gt.v);
}

double roc_auc_masked(const Image& scores, const Image& gt, const Image& mask) {
  if (!scores.same_shape(gt) || !scores.same_shape(mask))
    throw std::invalid_argument("roc_auc_masked: shape mismatch");
  std::vector<double> s, g;
  for (std::size_t i = 0; i < mask.v.size(); ++i) {
    if (mask.v[i] == 0.0) continue;
    s.push_back(scores.v[i]);
    g.push_back(gt.v[i]);
  }
  return roc_auc(s, g);
}

double dice(const Image& mask, const Image& gt) {
  if (!mask.same_shape(gt)) throw std::invalid_argument("dice: shape mismatch");
  std::uint64_t a = 0, b = 0, inter = 0;
  for (std::size_t i = 0; i < mask.v.size(); ++i) {
    const bool ma = mask.v[i] > 0.5;
    const bool mb = gt.v[i] > 0.5;
    a += ma;
    b += mb;
    inter += ma && mb;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

double accuracy(const Image& mask, const Image& gt) {
  if (!mask.same_shape(gt)) throw std::invalid_argument("accuracy: shape mismatch");
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < mask.v.size(); ++i)
    hits += (mask.v[i] > 0.5) == (gt.v[i] > 0.5);
  return static_cast<double>(hits) / static_cast<double>(mask.v.size());
}

ConfusionCounts confusion(const Image& scores, const Image& gt, double threshold) {
  if (!scores.same_shape(gt)) throw std::invalid_argument("confusion: shape mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.v.size(); ++i) {
    const bool pred = scores.v[i] > threshold;
    const bool truth = gt.v[i] > 0.5;
    if (pred && truth)
      ++c.tp;
    else if (pred && !truth)
      ++c.fp;
    else if (!pred && truth)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

Image threshold_image(const Image& scores, double threshold) {
  Image out = scores;
  for (double& v : out.v) v = v > threshold ? 1.0 : 0.0;
  return out;
}

namespace {

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRow>& rows) {
  std::string out = "method,class,n_detectors,seed,psnr_db,auc,dice,threshold\n";
  for (const EvalRow& r : rows) {
    out += r.method;
    out += ',' + std::to_string(r.class_id);
    out += ',' + std::to_string(r.n_detectors);
    out += ',' + std::to_string(r.seed);
    out += ',' + format_metric(r.psnr_db);
    out += ',' + format_metric(r.auc);
    out += ',' + format_metric(r.dice);
    out += ',' + format_metric(r.threshold);
    out += '\n';
  }
  io::write_text(path, out);
}

std::vector<EvalRow> read_eval_csv(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "method,class,n_detectors,seed,psnr_db,auc,dice,threshold")
    throw std::runtime_error("unexpected header in " + path.string());
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    EvalRow r;
    std::getline(ls, r.method, ',');
    std::getline(ls, field, ',');
    r.class_id = std::stoi(field);
    std::getline(ls, field, ',');
    r.n_detectors = std::stoi(field);
    std::getline(ls, field, ',');
    r.seed = std::stoull(field);
    std::getline(ls, field, ',');
    r.psnr_db = std::strtod(field.c_str(), nullptr);
    std::getline(ls, field, ',');
    r.auc = std::strtod(field.c_str(), nullptr);
    std::getline(ls, field, ',');
    r.dice = std::strtod(field.c_str(), nullptr);
    std::getline(ls, field, ',');
    r.threshold = std::strtod(field.c_str(), nullptr);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace pat
