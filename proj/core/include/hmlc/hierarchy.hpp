#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmlc {

/// Disease label forest. Each label has at most one parent; the file order of
/// labels is the canonical index order for every vector in the system.
/// Immutable after construction, safe to share across threads.
///
/// Config format, one label per line, '#' starts a comment:
///
///     No Finding
///     Cardiomegaly <- Enlarged Cardiomediastinum
///
class LabelHierarchy {
public:
    /// Parse and validate an edge-list document. Throws ValidationError
    /// naming the offending label on duplicates, unknown parents, multiple
    /// parents, or cycles.
    static LabelHierarchy parse(std::string_view config_text);

    static LabelHierarchy load(const std::filesystem::path& file);

    /// The shipped 14-label chest X-ray default: 6 edges, parent labels
    /// Enlarged Cardiomediastinum, Lung Opacity, Consolidation.
    static const LabelHierarchy& chexpert();

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t k) const { return labels_[k]; }

    std::optional<std::size_t> parent(std::size_t k) const { return parent_[k]; }
    const std::vector<std::size_t>& children(std::size_t k) const { return children_[k]; }

    /// Indices of nodes with at least one child, ascending.
    const std::vector<std::size_t>& parent_labels() const { return parent_label_indices_; }
    bool is_parent_label(std::size_t k) const { return !children_[k].empty(); }
    bool is_root(std::size_t k) const { return !parent_[k].has_value(); }

    std::size_t edge_count() const { return edge_count_; }

    /// Root-first path ending at k; roots have a path of length 1.
    const std::vector<std::size_t>& root_path(std::size_t k) const { return paths_[k]; }

    /// By-name variant; throws ValidationError on unknown labels.
    std::vector<std::string> root_path(const std::string& label) const;

    std::optional<std::size_t> find(const std::string& label) const;
    std::size_t index_of(const std::string& label) const;   // throws if unknown

    /// Canonical config text; parse(serialize()) reproduces this hierarchy.
    std::string serialize() const;

    /// 16-hex-digit digest of the canonical serialization. Recorded in
    /// checkpoints so predictions are never computed against the wrong forest.
    std::string digest() const;

private:
    std::vector<std::string> labels_;
    std::vector<std::optional<std::size_t>> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> paths_;
    std::vector<std::size_t> parent_label_indices_;
    std::size_t edge_count_ = 0;

    void build_derived();
};

} // namespace hmlc
