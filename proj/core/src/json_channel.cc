// Copyright 2026 The SpanSteer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spansteer/json_channel.h"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <regex>

#include "httplib.h"
#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

nlohmann::json check_reply(nlohmann::json reply, const std::string& who) {
  if (!reply.is_object()) throw AdapterError(who, "reply is not a JSON object");
  if (auto it = reply.find("error"); it != reply.end() && !it->is_null()) {
    throw AdapterError(who, "remote error: " + it->dump());
  }
  return reply;
}

}  // namespace

ProcessChannel::ProcessChannel(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw AdapterError("process", "empty command line");
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw AdapterError(describe(), "pipe() failed");
  }
  ::signal(SIGPIPE, SIG_IGN);
  pid_ = ::fork();
  if (pid_ < 0) throw AdapterError(describe(), "fork() failed");
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessChannel::~ProcessChannel() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    // Closing stdin asks the child to exit; fall back to SIGTERM.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, &status, 0);
  }
}

std::string ProcessChannel::describe() const { return "process:" + join(argv_, " "); }

nlohmann::json ProcessChannel::call(const nlohmann::json& request) {
  std::lock_guard lock(mu_);
  try {
    write_all(to_child_, request.dump() + "\n");
  } catch (const std::exception& e) {
    throw AdapterError(describe(), e.what());
  }
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        return check_reply(nlohmann::json::parse(line), describe());
      } catch (const nlohmann::json::exception& e) {
        throw AdapterError(describe(), std::string("malformed reply: ") + e.what());
      }
    }
    char chunk[4096];
    const auto n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw AdapterError(describe(), "adapter process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

HttpChannel::HttpChannel(std::string url, int timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {
  static const std::regex kUrl(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url_, m, kUrl)) throw AdapterError(url_, "unsupported adapter URL");
  host_ = m[1];
  port_ = m[2].matched ? std::stoi(m[2]) : 80;
  path_ = m[3].matched ? std::string(m[3]) : "/";
}

nlohmann::json HttpChannel::call(const nlohmann::json& request) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Post(path_, request.dump(), "application/json");
  if (!res) throw AdapterError(url_, "request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw AdapterError(url_, "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    return check_reply(nlohmann::json::parse(res->body), url_);
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(url_, std::string("malformed reply: ") + e.what());
  }
}

std::shared_ptr<JsonChannel> make_channel(const std::string& target) {
  if (target.rfind("http://", 0) == 0) return std::make_shared<HttpChannel>(target);
  if (target.rfind("process:", 0) == 0) {
    auto argv = split_whitespace(target.substr(8));
    if (argv.empty()) throw AdapterError(target, "empty command line");
    return std::make_shared<ProcessChannel>(std::move(argv));
  }
  throw AdapterError(target, "unknown channel (expected process:<cmd> or http://...)");
}

}  // namespace spansteer
