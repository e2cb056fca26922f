#pragma once

#include "ada/agent.hpp"

#include <fstream>
#include <string>

namespace ada {

inline constexpr const char* kCodeVersion = "0.1.0";

inline constexpr const char* kMetricsHeader =
    "update,env_steps,mean_ext_return,mean_int_reward,memory_action_frac,"
    "cliff_falls_cum,coverage,pred_loss,refl_loss,ae_loss,policy_loss,"
    "v_ext_loss,v_int_loss,entropy";

inline constexpr const char* kEpisodesHeader =
    "episode,update,env,length,ext_return,terminal,reached_goal";

std::string metrics_row_csv(const MetricsRow& row);
std::string episode_record_csv(const EpisodeRecord& rec);
const char* terminal_kind_name(TerminalKind kind);

/// Appends one row at a time and flushes after each: a killed run leaves a
/// parseable prefix on disk.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& metadata_comment,
              const std::string& header);
    void write_row(const std::string& row);

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace ada
