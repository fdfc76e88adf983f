#pragma once

#include <cstdint>
#include <vector>

#include "hmlc/data.hpp"
#include "hmlc/model.hpp"

namespace hmlc {

struct TrainConfig {
    double lr0 = 1e-4;            // epoch e trains at lr0 * decay^e, e from 0
    double lr_decay = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t batch_size = 32;
    std::size_t epochs_phase1 = 5;
    std::size_t epochs_phase2 = 5;
    std::uint64_t seed = 0;
};

struct EpochStat {
    int phase = 0;                // 1/2 for the two-phase schedule, 0 for flat
    std::size_t epoch = 0;
    double lr = 0.0;
    double mean_loss = 0.0;
};

struct TrainLog {
    std::size_t phase1_samples = 0;
    std::size_t phase1_negative_parent = 0;   // rows in the phase-1 set whose
                                              // filter predicate fails; always 0
    std::vector<EpochStat> epochs;
};

struct TrainResult {
    ModelParams model;
    TrainLog log;
};

/// Phase 1: Adam on the subset where every parent label maps positive, loss
/// restricted to non-parent labels. Phase 2: full data, every label, with all
/// layers except the last frozen. The learning-rate schedule and Adam moments
/// restart at each phase. Throws ValidationError when the conditional subset
/// is empty.
TrainResult train_two_phase(const Dataset& ds, const LabelHierarchy& h, const LabelPolicy& policy,
                            const TrainConfig& cfg, const ArchConfig& arch);

/// Single phase over the full data and all labels for
/// epochs_phase1 + epochs_phase2 epochs.
TrainResult train_flat(const Dataset& ds, const LabelHierarchy& h, const LabelPolicy& policy,
                       const TrainConfig& cfg, const ArchConfig& arch);

} // namespace hmlc
