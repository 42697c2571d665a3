#include <glop/selection.hpp>

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace glop {

std::vector<double> default_grid_values() {
  std::vector<double> v;
  for (int i = 0; i <= 100; i += 5) v.push_back(static_cast<double>(i));
  return v;
}

void CvGrid::validate() const {
  for (const auto* values : {&lambda_g_values, &lambda_l_values}) {
    if (values->empty()) throw ArgumentError("grid value lists must be nonempty");
    for (std::size_t i = 0; i < values->size(); ++i) {
      const double v = (*values)[i];
      if (!std::isfinite(v) || v < 0.0) throw ArgumentError("grid values must be finite and >= 0");
      if (i > 0 && !(v > (*values)[i - 1])) {
        throw ArgumentError("grid values must be strictly ascending");
      }
    }
  }
  if (folds < 2) throw ArgumentError("folds must be >= 2");
}

std::vector<GridCell> CvGrid::cells() const {
  std::vector<GridCell> out;
  for (double l : lambda_l_values) {
    for (double g : lambda_g_values) {
      if (global_at_most_local && g > l) continue;
      out.push_back({g, l});
    }
  }
  return out;
}

namespace {

std::string cell_text(const GridCell& c) {
  std::ostringstream out;
  out << "(lambda_g=" << c.lambda_g << ", lambda_l=" << c.lambda_l << ")";
  return out.str();
}

}  // namespace

SelectionResult select_from_scores(std::vector<ScoreRow> table, double tie_tolerance) {
  table.erase(std::remove_if(table.begin(), table.end(),
                             [](const ScoreRow& r) { return !std::isfinite(r.score) &&
                                                            r.score != -std::numeric_limits<double>::infinity(); }),
              table.end());
  if (table.empty()) throw SelectionError("no grid cell produced a usable score");

  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : table) best = std::min(best, r.score);
  const double band = std::isfinite(best) ? tie_tolerance * std::max(1.0, std::abs(best)) : 0.0;

  SelectionResult result;
  for (const auto& r : table) {
    const bool tied = std::isfinite(best) ? r.score - best <= band : r.score == best;
    if (tied) result.tied_cells.push_back({r.lambda_g, r.lambda_l});
  }
  std::vector<GridCell> pool = result.tied_cells;
  if (pool.size() > 1) {
    std::ostringstream first;
    first << pool.size() << " cells tie at score " << best;
    result.ties_broken.push_back(first.str());

    double top_l = -1.0;
    for (const auto& c : pool) top_l = std::max(top_l, c.lambda_l);
    std::erase_if(pool, [&](const GridCell& c) { return c.lambda_l != top_l; });
    std::ostringstream by_l;
    by_l << "largest lambda_l = " << top_l << " keeps " << pool.size();
    result.ties_broken.push_back(by_l.str());

    if (pool.size() > 1) {
      double top_g = -1.0;
      for (const auto& c : pool) top_g = std::max(top_g, c.lambda_g);
      std::erase_if(pool, [&](const GridCell& c) { return c.lambda_g != top_g; });
      std::ostringstream by_g;
      by_g << "largest lambda_g = " << top_g << " keeps " << pool.size();
      result.ties_broken.push_back(by_g.str());
    }
  }
  result.chosen = pool.front();
  result.best_score = best;
  result.score_table = std::move(table);
  return result;
}

FoldAssignment stratified_folds(const MultiTaskDataset& dataset, int folds, std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("folds must be >= 2");
  FoldAssignment out;
  out.folds = folds;
  std::mt19937_64 rng(seed);
  int offset = 0;
  for (const auto& block : dataset.blocks()) {
    const auto n = static_cast<std::size_t>(block.rows());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold(n);
    for (std::size_t i = 0; i < n; ++i) {
      fold[perm[i]] = static_cast<int>((static_cast<std::size_t>(offset) + i) %
                                       static_cast<std::size_t>(folds));
    }
    offset = static_cast<int>((static_cast<std::size_t>(offset) + n) %
                              static_cast<std::size_t>(folds));
    if (static_cast<int>(n) < folds) out.short_patients.push_back(block.patient_id);
    out.fold_of_row.push_back(std::move(fold));
  }
  return out;
}

namespace {

PatientBlock select_rows(const PatientBlock& block, const std::vector<int>& fold_of_row, int fold,
                         bool keep_fold) {
  std::vector<Index> rows;
  for (Index i = 0; i < block.rows(); ++i) {
    if ((fold_of_row[static_cast<std::size_t>(i)] == fold) == keep_fold) rows.push_back(i);
  }
  PatientBlock out;
  out.patient_id = block.patient_id;
  out.design.resize(static_cast<Index>(rows.size()), block.design.cols());
  out.targets.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.design.row(static_cast<Index>(r)) = block.design.row(rows[r]);
    out.targets(static_cast<Index>(r)) = block.targets(rows[r]);
  }
  return out;
}

}  // namespace

FoldSplit split_fold(const MultiTaskDataset& dataset, const FoldAssignment& assignment, int fold) {
  if (fold < 0 || fold >= assignment.folds) throw ArgumentError("fold out of range");
  if (assignment.fold_of_row.size() != dataset.num_patients()) {
    throw ArgumentError("fold assignment does not match the dataset");
  }
  FoldSplit split;
  std::vector<PatientBlock> train;
  for (std::size_t k = 0; k < dataset.num_patients(); ++k) {
    const PatientBlock& block = dataset.block(k);
    PatientBlock tr = select_rows(block, assignment.fold_of_row[k], fold, false);
    split.validation.push_back(select_rows(block, assignment.fold_of_row[k], fold, true));
    if (tr.rows() > 0) {
      split.train_index.emplace_back(static_cast<Index>(train.size()));
      train.push_back(std::move(tr));
    } else {
      split.train_index.emplace_back(std::nullopt);
    }
  }
  if (!train.empty()) {
    split.train.emplace(std::move(train), dataset.feature_names(), dataset.intercept_column());
  }
  return split;
}

double validation_mse(const GlopModel& model, const FoldSplit& split) {
  double sse = 0.0;
  Index count = 0;
  for (std::size_t k = 0; k < split.validation.size(); ++k) {
    const PatientBlock& block = split.validation[k];
    if (block.rows() == 0) continue;
    const Vector pred = predict(model, block.design, split.train_index[k]);
    sse += (block.targets - pred).squaredNorm();
    count += block.rows();
  }
  if (count == 0) throw ArgumentError("validation fold is empty");
  return sse / static_cast<double>(count);
}

SelectionResult cross_validate(const MultiTaskDataset& dataset, const std::vector<GridCell>& cells,
                               int folds, std::uint64_t seed, const FoldFitter& fitter,
                               int threads) {
  if (cells.empty()) throw SelectionError("grid is empty after applying the constraint");
  const FoldAssignment assignment = stratified_folds(dataset, folds, seed);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::vector<double>> per_fold(static_cast<std::size_t>(folds));
  detail::parallel_for(static_cast<std::size_t>(folds), threads, [&](std::size_t f) {
    const FoldSplit split = split_fold(dataset, assignment, static_cast<int>(f));
    bool has_validation = false;
    for (const auto& b : split.validation) has_validation = has_validation || b.rows() > 0;
    if (!split.train || !has_validation) {
      per_fold[f].assign(cells.size(), nan);
      return;
    }
    std::vector<double> scores = fitter(split, cells);
    if (scores.size() != cells.size()) scores.assign(cells.size(), nan);
    per_fold[f] = std::move(scores);
  });

  std::vector<ScoreRow> table;
  std::vector<GridCell> failed;
  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double sum = 0.0;
    int ok = 0;
    for (const auto& scores : per_fold) {
      if (std::isfinite(scores[c])) {
        sum += scores[c];
        ++ok;
      }
    }
    const int bad = folds - ok;
    if (ok == 0) {
      failed.push_back(cells[c]);
      warnings.push_back("cell " + cell_text(cells[c]) + " failed in every fold; excluded");
      continue;
    }
    if (bad > 0) {
      warnings.push_back("cell " + cell_text(cells[c]) + " failed in " + std::to_string(bad) +
                         " fold(s)");
    }
    table.push_back({cells[c].lambda_g, cells[c].lambda_l, sum / ok, bad});
  }
  SelectionResult result = select_from_scores(std::move(table));
  result.criterion = "cv";
  result.failed_cells = std::move(failed);
  for (const auto& id : assignment.short_patients) {
    warnings.push_back("patient '" + id + "' has fewer rows than folds");
  }
  result.warnings = std::move(warnings);
  return result;
}

std::vector<std::size_t> warm_start_order(const std::vector<GridCell>& cells) {
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> levels;
  for (const auto& c : cells) levels.push_back(c.lambda_l);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto rank = [&](double l) {
    return std::find(levels.begin(), levels.end(), l) - levels.begin();
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = rank(cells[a].lambda_l);
    const auto rb = rank(cells[b].lambda_l);
    if (ra != rb) return ra < rb;
    return ra % 2 == 0 ? cells[a].lambda_g > cells[b].lambda_g
                       : cells[a].lambda_g < cells[b].lambda_g;
  });
  return order;
}

namespace {

GlopPenalty cell_penalty(const GridCell& cell, const SelectionOptions& options) {
  GlopPenalty penalty;
  penalty.lambda_g = cell.lambda_g;
  penalty.lambda_l = cell.lambda_l;
  penalty.loss_scaling = options.loss_scaling;
  penalty.global_feature_weights = options.global_feature_weights;
  return penalty;
}

// Fits cells in warm-start order on one dataset, calling score(cell index, model).
template <class Score>
void fit_cells_warm(const MultiTaskDataset& data, const std::vector<GridCell>& cells,
                    const std::vector<std::size_t>& order, const SelectionOptions& options,
                    Score&& score) {
  std::optional<GlopModel> previous;
  for (std::size_t idx : order) {
    BcmOptions bcm = options.bcm;
    if (previous) {
      bcm.init_global = previous->global;
      bcm.init_local = previous->local;
    }
    try {
      GlopModel model = solve_glop_bcm(data, cell_penalty(cells[idx], options), bcm);
      score(idx, model);
      previous = std::move(model);
    } catch (const Error&) {
      score(idx, std::nullopt);
    }
  }
}

}  // namespace

SelectionResult cv_grid_search(const MultiTaskDataset& dataset, const CvGrid& grid,
                               const SelectionOptions& options) {
  grid.validate();
  const std::vector<GridCell> cells = grid.cells();
  if (cells.empty()) throw SelectionError("grid is empty after applying lambda_g <= lambda_l");
  const std::vector<std::size_t> order = warm_start_order(cells);

  FoldFitter fitter = [&](const FoldSplit& split, const std::vector<GridCell>& cs) {
    std::vector<double> scores(cs.size(), std::numeric_limits<double>::quiet_NaN());
    fit_cells_warm(*split.train, cs, order, options,
                   [&](std::size_t idx, const std::optional<GlopModel>& model) {
                     if (!model) return;
                     const double v = validation_mse(*model, split);
                     scores[idx] = std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
                   });
    return scores;
  };
  SelectionResult result = cross_validate(dataset, cells, grid.folds, grid.seed, fitter,
                                          options.threads);
  result.loss_scaling = options.loss_scaling;
  return result;
}

Index degrees_of_freedom(const GlopModel& model) {
  return static_cast<Index>((model.global.array() != 0.0).count() +
                            (model.local.array() != 0.0).count());
}

double bic_score(const MultiTaskDataset& dataset, const GlopModel& model,
                 std::vector<std::string>* warnings) {
  if (model.num_patients() != static_cast<Index>(dataset.num_patients()) ||
      model.num_features() != dataset.num_features()) {
    throw ArgumentError("model shape does not match the dataset");
  }
  double rss = 0.0;
  for (std::size_t k = 0; k < dataset.num_patients(); ++k) {
    const PatientBlock& b = dataset.block(k);
    rss += (b.targets - predict(model, b.design, static_cast<Index>(k))).squaredNorm();
  }
  const auto n = static_cast<double>(dataset.total_rows());
  if (rss == 0.0) {
    if (warnings) warnings->push_back("residual sum of squares is zero; BIC is -infinity");
    return -std::numeric_limits<double>::infinity();
  }
  return n * std::log(rss / n) + static_cast<double>(degrees_of_freedom(model)) * std::log(n);
}

SelectionResult bic_grid_select(const MultiTaskDataset& dataset, const CvGrid& grid,
                                const SelectionOptions& options) {
  grid.validate();
  const std::vector<GridCell> cells = grid.cells();
  if (cells.empty()) throw SelectionError("grid is empty after applying lambda_g <= lambda_l");

  // Cells sharing lambda_L form one warm-started chain; chains run in parallel.
  std::vector<double> levels;
  for (const auto& c : cells) levels.push_back(c.lambda_l);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<double> scores(cells.size(), std::numeric_limits<double>::quiet_NaN());
  // A fit with at least as many nonzeros as observations is saturated: RSS collapses
  // to rounding noise and ln(RSS / N) would outbid every sparse cell.
  std::vector<char> saturated(cells.size(), 0);
  const Index n_obs = dataset.total_rows();
  std::vector<std::vector<std::string>> chain_warnings(levels.size());
  detail::parallel_for(levels.size(), options.threads, [&](std::size_t li) {
    std::vector<std::size_t> chain;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].lambda_l == levels[li]) chain.push_back(c);
    }
    std::sort(chain.begin(), chain.end(),
              [&](std::size_t a, std::size_t b) { return cells[a].lambda_g > cells[b].lambda_g; });
    fit_cells_warm(dataset, cells, chain, options,
                   [&](std::size_t idx, const std::optional<GlopModel>& model) {
                     if (!model) return;
                     if (degrees_of_freedom(*model) >= n_obs) {
                       saturated[idx] = 1;
                       return;
                     }
                     scores[idx] = bic_score(dataset, *model, &chain_warnings[li]);
                   });
  });

  std::vector<ScoreRow> table;
  std::vector<GridCell> failed;
  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (saturated[c]) {
      warnings.push_back("cell " + cell_text(cells[c]) +
                         " is saturated (nonzeros >= observations); excluded");
      continue;
    }
    if (std::isnan(scores[c])) {
      failed.push_back(cells[c]);
      warnings.push_back("cell " + cell_text(cells[c]) + " failed to fit; excluded");
      continue;
    }
    table.push_back({cells[c].lambda_g, cells[c].lambda_l, scores[c], 0});
  }
  for (auto& w : chain_warnings) warnings.insert(warnings.end(), w.begin(), w.end());
  SelectionResult result = select_from_scores(std::move(table));
  result.criterion = "bic";
  result.loss_scaling = options.loss_scaling;
  result.failed_cells = std::move(failed);
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace glop
