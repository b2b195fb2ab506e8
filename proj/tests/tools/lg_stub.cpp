// External-model plugin stub: a Leslie-Gower map served over the line-JSON
// pipe protocol. Parameters come from argv: lambda1 lambda2 lambda3 followed
// by the nine competition entries row-major (defaults: lambda 3, diagonal 1,
// off-diagonal 0.5).

#include <cstdio>
#include <iostream>
#include <string>

#include "json.hpp"

#include "cslab/models.hpp"

using Json = nlohmann::json;
using namespace cslab;

int main(int argc, char** argv) {
  LeslieGowerParams params;
  params.lambda = Vec3(3, 3, 3);
  params.a << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  if (argc >= 13) {
    for (int i = 0; i < 3; ++i) params.lambda[i] = std::atof(argv[1 + i]);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) params.a(i, k) = std::atof(argv[4 + 3 * i + k]);
  }
  const MapModel model = MapModel::leslie_gower(params);

  std::string line;
  while (std::getline(std::cin, line)) {
    Json resp;
    try {
      const Json req = Json::parse(line);
      const std::string op = req.at("op").get<std::string>();
      if (op == "info") {
        const Point3 box = model.absorbing_box();
        resp["ok"] = true;
        resp["absorbing_box"] = {box[0], box[1], box[2]};
      } else if (op == "eval") {
        Json values = Json::array();
        for (const auto& pv : req.at("points")) {
          const Point3 x(pv.at(0).get<double>(), pv.at(1).get<double>(),
                         pv.at(2).get<double>());
          const Point3 y = model.eval(x);
          values.push_back({y[0], y[1], y[2]});
        }
        resp["ok"] = true;
        resp["values"] = values;
      } else if (op == "jacobian") {
        Json jacs = Json::array();
        for (const auto& pv : req.at("points")) {
          const Point3 x(pv.at(0).get<double>(), pv.at(1).get<double>(),
                         pv.at(2).get<double>());
          const Mat3 j = model.jacobian(x);
          Json flat = Json::array();
          for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) flat.push_back(j(i, k));
          jacs.push_back(flat);
        }
        resp["ok"] = true;
        resp["jacobians"] = jacs;
      } else {
        resp["ok"] = false;
        resp["error"] = "unknown op " + op;
      }
    } catch (const std::exception& e) {
      resp["ok"] = false;
      resp["error"] = e.what();
    }
    std::cout << resp.dump() << "\n" << std::flush;
  }
  return 0;
}
