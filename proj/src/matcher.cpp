#include "glush/matcher.hpp"

#include <chrono>

namespace glush {

std::unique_ptr<CompiledPattern> CompiledPattern::compile(std::string_view pattern) {
    auto cp = std::unique_ptr<CompiledPattern>(new CompiledPattern());
    cp->tree_ = parse(pattern);
    cp->tables_ = analyze(cp->tree_, AnalyzeMode::compact);
    cp->index_ = std::make_unique<InternalIndex>(cp->tree_, cp->tables_);
    cp->lca_ = std::make_unique<LcaStructure>(cp->tree_);
    cp->firstlabel_ = std::make_unique<FirstLabelStructure>(cp->tree_, cp->tables_);
    cp->engine_ = std::make_unique<Engine>(cp->tree_, cp->tables_, *cp->index_, *cp->lca_,
                                           *cp->firstlabel_);
    for (int32_t r : cp->tables_.first[static_cast<size_t>(cp->tree_.root)])
        cp->first_by_char_[cp->tree_.label_of_position(r)].push_back(r);
    cp->last_bitmap_.assign(static_cast<size_t>(cp->tree_.num_positions()), 0);
    for (int32_t r : cp->tables_.last[static_cast<size_t>(cp->tree_.root)])
        cp->last_bitmap_[static_cast<size_t>(r)] = 1;
    return cp;
}

MatchReport CompiledPattern::run(std::u32string_view text) const {
    auto t0 = std::chrono::steady_clock::now();
    MatchReport report;
    report.n = static_cast<int64_t>(text.size());
    report.m = num_positions();
    report.step_sizes.reserve(text.size() + 1);
    report.step_sizes.push_back(1); // the start state
    report.density = 1;

    // current and next state set; nothing else outlives a step
    std::vector<int32_t> current;
    TransitionScratch scratch;
    for (size_t i = 0; i < text.size(); ++i) {
        if (i == 0) {
            const auto* f = first_by_char(text[0]);
            current = f ? *f : std::vector<int32_t>{};
        } else {
            current = engine_->state_set_transition(current, text[i], report.counters, scratch);
        }
        report.step_sizes.push_back(static_cast<int64_t>(current.size()));
        report.density += current.size();
        if (current.empty()) {
            report.step_sizes.resize(text.size() + 1, 0);
            break;
        }
    }
    if (text.empty()) {
        report.accepted = nullable();
    } else {
        for (int32_t r : current)
            if (is_last(r)) report.accepted = true;
    }
    auto t1 = std::chrono::steady_clock::now();
    report.micros = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
    return report;
}

MatchReport CompiledPattern::run_utf8(std::string_view text) const {
    return run(decode_text(text));
}

MatchReport match(std::string_view pattern, std::string_view text) {
    return CompiledPattern::compile(pattern)->run_utf8(text);
}

MatchReport density_profile(std::string_view pattern, std::string_view text) {
    return match(pattern, text);
}

} // namespace glush
