#ifndef PCL_LOG_HPP
#define PCL_LOG_HPP

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace pcl {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the PCL_LOG environment variable (error|warn|info|debug).
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("PCL_LOG");
    if (!env) return LogLevel::Warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

template <typename... Args>
void log(LogLevel lvl, const char* fmt, Args... args) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  const char* tag = lvl == LogLevel::Error  ? "error"
                    : lvl == LogLevel::Warn ? "warn"
                    : lvl == LogLevel::Info ? "info"
                                            : "debug";
  std::fprintf(stderr, "[pcl %s] ", tag);
  if constexpr (sizeof...(Args) == 0)
    std::fputs(fmt, stderr);
  else
    std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

#define PCL_WARN(...) ::pcl::log(::pcl::LogLevel::Warn, __VA_ARGS__)
#define PCL_INFO(...) ::pcl::log(::pcl::LogLevel::Info, __VA_ARGS__)
#define PCL_DEBUG(...) ::pcl::log(::pcl::LogLevel::Debug, __VA_ARGS__)

}  // namespace pcl

#endif
