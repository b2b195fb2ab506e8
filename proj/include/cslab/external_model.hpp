#ifndef CSLAB_EXTERNAL_MODEL_HPP_
#define CSLAB_EXTERNAL_MODEL_HPP_

#include <memory>
#include <string>
#include <vector>

#include "cslab/models.hpp"

namespace cslab {

// Client for the external-model plugin convention: the named executable
// receives one JSON request per line on stdin and answers one JSON response
// per line on stdout.
//
//   {"op":"eval","points":[[x1,x2,x3],...]}    -> {"ok":true,"values":[[...],...]}
//   {"op":"jacobian","points":[[...],...]}     -> {"ok":true,"jacobians":[[9 row-major],...]}
//   {"op":"info"}                              -> {"ok":true,"absorbing_box":[...]}
//
// The absorbing_box field of the info response is optional; a model without
// one can only be used for operations that do not need a box. Errors are
// reported as {"ok":false,"error":"..."}.
class ExternalModelProcess {
 public:
  explicit ExternalModelProcess(const std::string& command,
                                const std::vector<std::string>& args = {});
  ~ExternalModelProcess();

  ExternalModelProcess(const ExternalModelProcess&) = delete;
  ExternalModelProcess& operator=(const ExternalModelProcess&) = delete;

  std::vector<Point3> eval_batch(const std::vector<Point3>& points);
  std::vector<Mat3> jacobian_batch(const std::vector<Point3>& points);
  std::optional<Point3> absorbing_box();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Wraps a plugin subprocess as a MapModel. Calls are serialized internally,
// so the returned model keeps the concurrent-use contract.
MapModel external_process_model(const std::string& command,
                                const std::vector<std::string>& args = {},
                                Real fd_step = 1e-6);

}  // namespace cslab

#endif  // CSLAB_EXTERNAL_MODEL_HPP_
