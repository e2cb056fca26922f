#include "ada/metrics.hpp"

#include "ada/error.hpp"
#include "ada/util.hpp"

namespace ada {

std::string metrics_row_csv(const MetricsRow& r) {
    std::string s;
    s += fmt_int(r.update);
    s += ',';
    s += fmt_int(r.env_steps);
    s += ',';
    s += fmt_double(r.mean_ext_return);
    s += ',';
    s += fmt_double(r.mean_int_reward);
    s += ',';
    s += fmt_double(r.memory_action_frac);
    s += ',';
    s += fmt_int(r.cliff_falls_cum);
    s += ',';
    s += fmt_int(r.coverage);
    s += ',';
    s += fmt_double(r.pred_loss);
    s += ',';
    s += fmt_double(r.refl_loss);
    s += ',';
    s += fmt_double(r.ae_loss);
    s += ',';
    s += fmt_double(r.policy_loss);
    s += ',';
    s += fmt_double(r.v_ext_loss);
    s += ',';
    s += fmt_double(r.v_int_loss);
    s += ',';
    s += fmt_double(r.entropy);
    return s;
}

const char* terminal_kind_name(TerminalKind kind) {
    switch (kind) {
        case TerminalKind::goal: return "goal";
        case TerminalKind::death: return "death";
        case TerminalKind::truncated: return "truncated";
    }
    return "?";
}

std::string episode_record_csv(const EpisodeRecord& rec) {
    std::string s;
    s += fmt_int(rec.episode_index);
    s += ',';
    s += fmt_int(rec.update);
    s += ',';
    s += fmt_int(rec.env);
    s += ',';
    s += fmt_int(rec.length);
    s += ',';
    s += fmt_double(rec.ext_return);
    s += ',';
    s += terminal_kind_name(rec.kind);
    s += ',';
    s += rec.reached_goal ? "1" : "0";
    return s;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& metadata_comment,
                     const std::string& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw io_error("cannot open for writing: " + path);
    if (!metadata_comment.empty()) out_ << metadata_comment;
    out_ << header << '\n';
    out_.flush();
}

void CsvWriter::write_row(const std::string& row) {
    out_ << row << '\n';
    out_.flush();
    if (!out_) throw io_error("write failed: " + path_);
}

} // namespace ada
