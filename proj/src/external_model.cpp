#include "cslab/external_model.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <mutex>

#include "json.hpp"

namespace cslab {

using Json = nlohmann::json;

struct ExternalModelProcess::Impl {
  pid_t pid = -1;
  FILE* to_child = nullptr;
  FILE* from_child = nullptr;
  std::mutex mutex;
  std::string command;

  Json request(const Json& req) {
    std::lock_guard<std::mutex> lock(mutex);
    const std::string line = req.dump();
    if (std::fputs(line.c_str(), to_child) == EOF || std::fputc('\n', to_child) == EOF ||
        std::fflush(to_child) != 0)
      throw Error(Errc::ProcessError, "write to external model failed: " + command);
    char* buf = nullptr;
    size_t cap = 0;
    const ssize_t n = ::getline(&buf, &cap, from_child);
    if (n <= 0) {
      std::free(buf);
      throw Error(Errc::ProcessError, "external model closed its stdout: " + command);
    }
    std::string resp_line(buf, size_t(n));
    std::free(buf);
    Json resp;
    try {
      resp = Json::parse(resp_line);
    } catch (const std::exception& e) {
      throw Error(Errc::ProcessError,
                  std::string("bad JSON from external model: ") + e.what());
    }
    if (!resp.value("ok", false))
      throw Error(Errc::ProcessError,
                  "external model error: " + resp.value("error", "unknown"));
    return resp;
  }
};

ExternalModelProcess::ExternalModelProcess(const std::string& command,
                                           const std::vector<std::string>& args)
    : impl_(std::make_unique<Impl>()) {
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

  impl_->command = command;
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
    throw Error(Errc::ProcessError, "pipe() failed");
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(Errc::ProcessError, "fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(command.c_str()));
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    ::execvp(command.c_str(), argv.data());
    std::perror("execvp");
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  impl_->pid = pid;
  impl_->to_child = ::fdopen(in_pipe[1], "w");
  impl_->from_child = ::fdopen(out_pipe[0], "r");
  if (!impl_->to_child || !impl_->from_child)
    throw Error(Errc::ProcessError, "fdopen() failed");
}

ExternalModelProcess::~ExternalModelProcess() {
  if (impl_->to_child) std::fclose(impl_->to_child);
  if (impl_->from_child) std::fclose(impl_->from_child);
  if (impl_->pid > 0) {
    int status = 0;
    ::waitpid(impl_->pid, &status, 0);
  }
}

std::vector<Point3> ExternalModelProcess::eval_batch(const std::vector<Point3>& points) {
  Json req;
  req["op"] = "eval";
  auto& pts = req["points"] = Json::array();
  for (const auto& p : points) pts.push_back({p[0], p[1], p[2]});
  const Json resp = impl_->request(req);
  const auto& values = resp.at("values");
  if (values.size() != points.size())
    throw Error(Errc::ProcessError, "external model returned wrong batch size");
  std::vector<Point3> out;
  out.reserve(points.size());
  for (const auto& v : values) out.emplace_back(v.at(0).get<Real>(), v.at(1).get<Real>(), v.at(2).get<Real>());
  return out;
}

std::vector<Mat3> ExternalModelProcess::jacobian_batch(const std::vector<Point3>& points) {
  Json req;
  req["op"] = "jacobian";
  auto& pts = req["points"] = Json::array();
  for (const auto& p : points) pts.push_back({p[0], p[1], p[2]});
  const Json resp = impl_->request(req);
  const auto& jacs = resp.at("jacobians");
  if (jacs.size() != points.size())
    throw Error(Errc::ProcessError, "external model returned wrong batch size");
  std::vector<Mat3> out;
  out.reserve(points.size());
  for (const auto& jv : jacs) {
    if (jv.size() != 9)
      throw Error(Errc::ProcessError, "jacobian entry must hold 9 numbers");
    Mat3 j;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) j(i, k) = jv.at(std::size_t(3 * i + k)).get<Real>();
    out.push_back(j);
  }
  return out;
}

std::optional<Point3> ExternalModelProcess::absorbing_box() {
  Json req;
  req["op"] = "info";
  const Json resp = impl_->request(req);
  if (!resp.contains("absorbing_box") || resp["absorbing_box"].is_null())
    return std::nullopt;
  const auto& b = resp["absorbing_box"];
  return Point3(b.at(0).get<Real>(), b.at(1).get<Real>(), b.at(2).get<Real>());
}

MapModel external_process_model(const std::string& command,
                                const std::vector<std::string>& args, Real fd_step) {
  auto proc = std::make_shared<ExternalModelProcess>(command, args);
  ExternalHooks hooks;
  hooks.description = command;
  hooks.absorbing_box = proc->absorbing_box();
  hooks.eval = [proc](const Point3& x) { return proc->eval_batch({x})[0]; };
  hooks.jacobian = [proc](const Point3& x) { return proc->jacobian_batch({x})[0]; };
  return MapModel::external(std::move(hooks), fd_step);
}

}  // namespace cslab
