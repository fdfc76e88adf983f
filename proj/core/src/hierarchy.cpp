#include "hmlc/hierarchy.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "hmlc/csv.hpp"
#include "hmlc/errors.hpp"
#include "hmlc/hash.hpp"

namespace hmlc {

namespace {

const char* kChexpertConfig =
    "# 14-label chest X-ray hierarchy, column order of the standard label CSVs\n"
    "No Finding\n"
    "Enlarged Cardiomediastinum\n"
    "Cardiomegaly <- Enlarged Cardiomediastinum\n"
    "Lung Opacity\n"
    "Lung Lesion <- Lung Opacity\n"
    "Edema <- Lung Opacity\n"
    "Consolidation <- Lung Opacity\n"
    "Pneumonia <- Consolidation\n"
    "Atelectasis <- Lung Opacity\n"
    "Pneumothorax\n"
    "Pleural Effusion\n"
    "Pleural Other\n"
    "Fracture\n"
    "Support Devices\n";

} // namespace

LabelHierarchy LabelHierarchy::parse(std::string_view config_text) {
    LabelHierarchy h;
    std::map<std::string, std::size_t> index;
    std::vector<std::string> parent_names;   // empty string = root

    std::istringstream in{std::string(config_text)};
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::string label, parent;
        auto arrow = line.find("<-");
        if (arrow != std::string::npos) {
            label = trim(line.substr(0, arrow));
            parent = trim(line.substr(arrow + 2));
            if (label.empty() || parent.empty()) {
                throw ValidationError("hierarchy: malformed edge line '" + line + "'");
            }
        } else {
            label = line;
        }

        auto it = index.find(label);
        if (it != index.end()) {
            if (!parent.empty() && !parent_names[it->second].empty()) {
                throw ValidationError("hierarchy: label '" + label + "' has multiple parents");
            }
            throw ValidationError("hierarchy: duplicate label '" + label + "'");
        }
        index.emplace(label, h.labels_.size());
        h.labels_.push_back(label);
        parent_names.push_back(parent);
    }

    if (h.labels_.empty()) {
        throw ValidationError("hierarchy: config lists no labels");
    }

    h.parent_.resize(h.labels_.size());
    for (std::size_t k = 0; k < h.labels_.size(); ++k) {
        if (parent_names[k].empty()) continue;
        auto it = index.find(parent_names[k]);
        if (it == index.end()) {
            throw ValidationError("hierarchy: label '" + h.labels_[k] + "' names unknown parent '" +
                                  parent_names[k] + "'");
        }
        if (it->second == k) {
            throw ValidationError("hierarchy: cycle involving label '" + h.labels_[k] + "'");
        }
        h.parent_[k] = it->second;
        ++h.edge_count_;
    }

    h.build_derived();
    return h;
}

void LabelHierarchy::build_derived() {
    const std::size_t n = labels_.size();
    children_.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
        if (parent_[k]) children_[*parent_[k]].push_back(k);
    }

    paths_.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<std::size_t> path;
        std::size_t cur = k;
        path.push_back(cur);
        while (parent_[cur]) {
            cur = *parent_[cur];
            path.push_back(cur);
            if (path.size() > n) {
                throw ValidationError("hierarchy: cycle involving label '" + labels_[k] + "'");
            }
        }
        paths_[k].assign(path.rbegin(), path.rend());
    }

    parent_label_indices_.clear();
    for (std::size_t k = 0; k < n; ++k) {
        if (!children_[k].empty()) parent_label_indices_.push_back(k);
    }
}

LabelHierarchy LabelHierarchy::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ValidationError("cannot open hierarchy file: " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const LabelHierarchy& LabelHierarchy::chexpert() {
    static const LabelHierarchy h = parse(kChexpertConfig);
    return h;
}

std::vector<std::string> LabelHierarchy::root_path(const std::string& label) const {
    const auto& path = paths_[index_of(label)];
    std::vector<std::string> names;
    names.reserve(path.size());
    for (std::size_t k : path) names.push_back(labels_[k]);
    return names;
}

std::optional<std::size_t> LabelHierarchy::find(const std::string& label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k) {
        if (labels_[k] == label) return k;
    }
    return std::nullopt;
}

std::size_t LabelHierarchy::index_of(const std::string& label) const {
    if (auto k = find(label)) return *k;
    throw ValidationError("hierarchy: unknown label '" + label + "'");
}

std::string LabelHierarchy::serialize() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < labels_.size(); ++k) {
        out << labels_[k];
        if (parent_[k]) out << " <- " << labels_[*parent_[k]];
        out << '\n';
    }
    return out.str();
}

std::string LabelHierarchy::digest() const {
    return hex64(fnv1a64(serialize()));
}

} // namespace hmlc
