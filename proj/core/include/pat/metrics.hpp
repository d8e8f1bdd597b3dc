#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "pat/image.hpp"

namespace pat {

/// Sentinel PSNR for an exact match; kept finite-representable in CSV as
/// "inf".
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

/// 10*log10(range^2 / MSE) with range = max(gt) - min(gt). Identical images
/// return the infinite sentinel; a constant ground truth is rejected because
/// the range is empty.
double psnr(const Image& u, const Image& gt);

/// Exact ROC area via the rank-sum statistic with midrank tie handling.
/// Ground truth must contain both classes (entries are compared to 0.5).
double roc_auc(const std::vector<double>& scores, const std::vector<double>& gt);
double roc_auc(const Image& scores, const Image& gt);

/// AUC restricted to pixels where mask is nonzero.
double roc_auc_masked(const Image& scores, const Image& gt, const Image& mask);

/// 2|A and B| / (|A| + |B|); both masks empty gives 1.
double dice(const Image& mask, const Image& gt);

double accuracy(const Image& mask, const Image& gt);

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};
ConfusionCounts confusion(const Image& scores, const Image& gt, double threshold);

/// Binarization of a score map at a threshold.
Image threshold_image(const Image& scores, double threshold);

struct EvalRow {
  std::string method;
  int class_id = 0;
  int n_detectors = 0;
  std::uint64_t seed = 0;
  double psnr_db = 0;
  double auc = 0;
  double dice = 0;
  double threshold = 0;
};

/// CSV with header: method,class,n_detectors,seed,psnr_db,auc,dice,threshold
void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRow>& rows);
std::vector<EvalRow> read_eval_csv(const std::filesystem::path& path);

}  // namespace pat
