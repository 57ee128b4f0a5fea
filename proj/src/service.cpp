#include "spcdt/service.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/core.h>

#include "httplib.h"
#include "spcdt/analysis.hpp"
#include "spcdt/error.hpp"
#include "spcdt/pairing.hpp"
#include "spcdt/scene_json.hpp"

namespace spcdt {

namespace {

Response json_response(int status, const Json& body) { return {status, body.dump() + "\n"}; }

Response error_response(int status, const std::string& message) {
  return json_response(status, Json{{"error", message}});
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '/');) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

Json require_object(const std::string& body) {
  Json j = parse_json(body.empty() ? "{}" : body);
  if (!j.is_object()) throw InputError("request body must be a JSON object");
  return j;
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InputError(fmt::format("unknown field '{}'", key));
    }
  }
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(fmt::format("missing field '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(fmt::format("field '{}' has the wrong type", key));
  }
}

std::shared_ptr<const SessionSnapshot> make_snapshot(SceneInputs inputs, std::optional<std::string> dataset_id,
                                                     std::shared_ptr<const Dataset> validation) {
  auto snap = std::make_shared<SessionSnapshot>();
  snap->scene = realize(std::move(inputs));
  snap->scene_json = scene_to_json(snap->scene).dump() + "\n";
  snap->dataset_id = std::move(dataset_id);
  snap->validation = std::move(validation);
  return snap;
}

// Drops condensation selectors the plan no longer has.
void prune_options(SceneOptions& options, const PairingPlan& plan) {
  std::erase_if(options.condensed_regions, [&](const RegionRef& r) {
    return r.plot_id >= plan.plots.size() || r.region >= plan.plots[r.plot_id].regions.size();
  });
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}

std::size_t Service::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError(fmt::format("unknown session '{}'", id));
  return it->second;
}

Dataset Service::load_dataset_id(const std::string& id) const {
  static const std::regex kSafe("[A-Za-z0-9_.-]+");
  if (!std::regex_match(id, kSafe) || id.find("..") != std::string::npos) {
    throw InputError(fmt::format("invalid dataset id '{}'", id));
  }
  const auto path = config_.data_dir / (id + ".csv");
  if (!std::filesystem::exists(path)) throw NotFoundError(fmt::format("unknown dataset '{}'", id));
  return load_csv_file(path);
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body,
                         const std::map<std::string, std::string>& query) {
  try {
    const auto seg = segments(path);
    if (seg.empty() || seg[0] != "sessions") return error_response(404, fmt::format("no route for {}", path));
    if (seg.size() == 1) {
      if (method != "POST") return error_response(405, "use POST /sessions");
      return create_session(body);
    }
    auto session = find(seg[1]);
    const std::string what = seg.size() >= 3 ? seg[2] : "";
    const auto snap = session->load();

    if (seg.size() == 2 && method == "DELETE") {
      std::lock_guard lock(sessions_mutex_);
      sessions_.erase(seg[1]);
      return json_response(200, Json{{"deleted", seg[1]}});
    }
    if (seg.size() == 3 && what == "scene" && method == "GET") return {200, snap->scene_json};
    if (seg.size() == 3 && what == "evaluation" && method == "GET") {
      return json_response(200, evaluation_to_json(snap->scene.evaluation));
    }
    if (seg.size() == 3 && what == "workspace" && method == "GET") return workspace(*snap);
    if (seg.size() == 4 && what == "reports" && method == "GET") return report(*snap, seg[3], query);
    if (seg.size() == 3 && what == "threshold" && method == "PATCH") return patch_threshold(*session, body);
    if (seg.size() == 3 && what == "layout" && method == "PATCH") return patch_layout(*session, body);
    if (seg.size() == 3 && what == "undo" && method == "POST") return undo(*session);
    return error_response(404, fmt::format("no route for {} {}", method, path));
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const InvalidEditError& e) {
    return error_response(422, e.what());
  } catch (const InputError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

Response Service::create_session(const std::string& body) {
  const Json req = require_object(body);
  check_keys(req, {"dataset_id", "csv", "label_column", "missing_token", "tree_json", "tree_text", "induce_params",
                   "split", "validation_id", "validation_csv", "placements", "options"});

  CsvOptions csv;
  if (req.contains("label_column")) csv.label_column = field<std::string>(req, "label_column");
  if (req.contains("missing_token")) csv.missing_token = field<std::string>(req, "missing_token");

  std::optional<std::string> dataset_id;
  Dataset data;
  if (req.contains("dataset_id") == req.contains("csv")) throw InputError("give exactly one of 'dataset_id' or 'csv'");
  if (req.contains("dataset_id")) {
    dataset_id = field<std::string>(req, "dataset_id");
    data = load_dataset_id(*dataset_id);
  } else {
    std::istringstream in(field<std::string>(req, "csv"));
    data = load_csv(in, csv);
  }

  std::shared_ptr<const Dataset> validation;
  if (req.contains("split")) {
    const Json& s = req["split"];
    if (!s.is_object()) throw InputError("'split' must be an object");
    check_keys(s, {"train_fraction", "seed"});
    auto [train, rest] = split(data, field<double>(s, "train_fraction"), field<std::uint64_t>(s, "seed"));
    data = std::move(train);
    validation = std::make_shared<const Dataset>(std::move(rest));
  }
  if (req.contains("validation_id")) {
    validation = std::make_shared<const Dataset>(load_dataset_id(field<std::string>(req, "validation_id")));
  } else if (req.contains("validation_csv")) {
    std::istringstream in(field<std::string>(req, "validation_csv"));
    validation = std::make_shared<const Dataset>(load_csv(in, csv));
  }

  const int sources = int(req.contains("tree_json")) + int(req.contains("tree_text")) + int(req.contains("induce_params"));
  if (sources > 1) throw InputError("give at most one of 'tree_json', 'tree_text', 'induce_params'");
  std::optional<DecisionTree> tree;
  if (req.contains("tree_json")) {
    const Json& t = req["tree_json"];
    tree = tree_from_json(t.is_string() ? t.get<std::string>() : t.dump());
  } else if (req.contains("tree_text")) {
    tree = parse_tree_text(field<std::string>(req, "tree_text"));
  } else {
    InduceParams params;
    if (req.contains("induce_params")) {
      const Json& p = req["induce_params"];
      if (!p.is_object()) throw InputError("'induce_params' must be an object");
      check_keys(p, {"min_leaf", "max_depth", "min_gain"});
      if (p.contains("min_leaf")) params.min_leaf = field<std::size_t>(p, "min_leaf");
      if (p.contains("max_depth")) params.max_depth = field<std::size_t>(p, "max_depth");
      if (p.contains("min_gain")) params.min_gain = field<double>(p, "min_gain");
    }
    tree = induce_id3(data, params);
  }

  SceneInputs inputs;
  inputs.tree = std::make_shared<const DecisionTree>(std::move(*tree));
  inputs.dataset = std::make_shared<const Dataset>(std::move(data));
  inputs.plan = std::make_shared<const PairingPlan>(derive_plot_units(*inputs.tree, *inputs.dataset));
  inputs.placements = default_placement(*inputs.plan);
  if (req.contains("placements")) {
    if (!req["placements"].is_array()) throw InputError("'placements' must be an array");
    for (const Json& p : req["placements"]) {
      const PlotPlacement placement = placement_from_json(p);
      std::erase_if(inputs.placements, [&](const PlotPlacement& q) { return q.plot_id == placement.plot_id; });
      inputs.placements.push_back(placement);
    }
    std::sort(inputs.placements.begin(), inputs.placements.end(),
              [](const PlotPlacement& a, const PlotPlacement& b) { return a.plot_id < b.plot_id; });
  }
  if (req.contains("options")) patch_options(inputs.options, req["options"]);

  auto session = std::make_shared<Session>();
  session->current = make_snapshot(std::move(inputs), dataset_id, validation);

  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    id = fmt::format("s{}", next_id_++);
    sessions_[id] = session;
  }
  return json_response(201, Json{{"session_id", id}});
}

Response Service::patch_threshold(Session& s, const std::string& body) {
  const Json req = require_object(body);
  check_keys(req, {"node_id", "value"});
  const auto node = field<NodeId>(req, "node_id");
  const auto value = field<double>(req, "value");

  std::lock_guard lock(s.write);
  const auto before = s.load();
  SceneInputs inputs = before->scene.inputs;
  inputs.tree = std::make_shared<const DecisionTree>(adjust_threshold(*inputs.tree, node, value));
  inputs.plan = std::make_shared<const PairingPlan>(derive_plot_units(*inputs.tree, *inputs.dataset));
  prune_options(inputs.options, *inputs.plan);
  auto after = make_snapshot(std::move(inputs), before->dataset_id, before->validation);

  Json changed = Json::array();
  const Dataset& data = *after->scene.inputs.dataset;
  const TreeBinding old_binding(*before->scene.inputs.tree, data);
  const TreeBinding new_binding(*after->scene.inputs.tree, data);
  for (const Case& c : data.cases()) {
    if (predict(*before->scene.inputs.tree, old_binding, c).class_name !=
        predict(*after->scene.inputs.tree, new_binding, c).class_name) {
      changed.push_back(c.id);
    }
  }
  Json out{{"scene", Json::parse(after->scene_json)},
           {"evaluation", evaluation_to_json(after->scene.evaluation)},
           {"delta",
            {{"error_rate_before", before->scene.evaluation.error_rate},
             {"error_rate_after", after->scene.evaluation.error_rate},
             {"changed_cases", std::move(changed)}}}};
  s.undo.push_back(before);
  s.publish(std::move(after));
  return json_response(200, out);
}

Response Service::patch_layout(Session& s, const std::string& body) {
  const Json req = require_object(body);
  check_keys(req, {"relocate", "flip", "swap", "condense", "expand", "jitter", "trace_mode", "context", "summary",
                   "case_selection"});

  std::lock_guard lock(s.write);
  const auto before = s.load();
  SceneGraph scene = before->scene;

  auto plot_of = [](const Json& j, const char* what) {
    if (!j.is_object()) throw InputError(fmt::format("'{}' must be an object", what));
    return field<std::size_t>(j, "plot_id");
  };
  auto regions_of = [](const Json& j) {
    Json wrapped{{"condensed_regions", j.is_array() && !j.empty() && j[0].is_number() ? Json::array({j}) : j}};
    SceneOptions probe;
    patch_options(probe, wrapped);
    return probe.condensed_regions;
  };

  if (req.contains("relocate")) {
    const Json& r = req["relocate"];
    const std::size_t plot = plot_of(r, "relocate");
    check_keys(r, {"plot_id", "origin"});
    const PlotPlacement probe = placement_from_json(Json{{"plot_id", plot}, {"origin", r.value("origin", Json())}});
    scene = apply_transforms(scene, plot, Relocate{probe.origin});
  }
  if (req.contains("flip")) {
    const Json& f = req["flip"];
    const std::size_t plot = plot_of(f, "flip");
    check_keys(f, {"plot_id", "axis"});
    const std::string axis = field<std::string>(f, "axis");
    if (axis != "h" && axis != "v") throw InputError("flip axis must be 'h' or 'v'");
    scene = apply_transforms(scene, plot, axis == "h" ? PlacementEdit{FlipH{}} : PlacementEdit{FlipV{}});
  }
  if (req.contains("swap")) {
    const Json& w = req["swap"];
    check_keys(w, {"plot_id"});
    scene = apply_transforms(scene, plot_of(w, "swap"), Swap{});
  }
  if (req.contains("condense")) scene = condense(scene, regions_of(req["condense"]));
  if (req.contains("expand")) scene = expand(scene, regions_of(req["expand"]));

  Json option_patch = Json::object();
  for (const char* key : {"jitter", "trace_mode", "context", "summary", "case_selection"}) {
    if (req.contains(key)) option_patch[key] = req[key];
  }
  if (!option_patch.empty()) {
    SceneOptions options = scene.options();
    patch_options(options, option_patch);
    scene = with_options(scene, std::move(options));
  }

  auto after = std::make_shared<SessionSnapshot>();
  after->scene = std::move(scene);
  after->scene_json = scene_to_json(after->scene).dump() + "\n";
  after->dataset_id = before->dataset_id;
  after->validation = before->validation;
  s.undo.push_back(before);
  s.publish(after);
  return {200, after->scene_json};
}

Response Service::undo(Session& s) {
  std::lock_guard lock(s.write);
  if (s.undo.empty()) return error_response(409, "nothing to undo");
  s.publish(s.undo.back());
  s.undo.pop_back();
  return {200, s.load()->scene_json};
}

Response Service::report(const SessionSnapshot& snap, const std::string& kind,
                         const std::map<std::string, std::string>& query) const {
  const DecisionTree& tree = *snap.scene.inputs.tree;
  const Dataset& data = *snap.scene.inputs.dataset;
  if (kind == "overgen") return json_response(200, to_json(overgeneralization(tree, data)));
  if (kind == "margins") {
    std::optional<double> epsilon;
    if (auto it = query.find("epsilon"); it != query.end()) {
      try {
        std::size_t used = 0;
        epsilon = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw InputError(fmt::format("epsilon '{}' is not a number", it->second));
      }
    }
    return json_response(200, to_json(margins(tree, data, epsilon)));
  }
  if (kind == "split-compare") {
    if (!snap.validation) throw InvalidEditError("the session has no validation data");
    return json_response(200, to_json(split_compare(tree, data, *snap.validation)));
  }
  throw NotFoundError(fmt::format("unknown report '{}' (overgen|margins|split-compare)", kind));
}

Response Service::workspace(const SessionSnapshot& snap) const {
  Json placements = Json::array();
  for (const ScenePlot& p : snap.scene.plots) placements.push_back(placement_to_json(p.placement));
  return json_response(200, Json{{"dataset_id", snap.dataset_id ? Json(*snap.dataset_id) : Json(nullptr)},
                                 {"tree_json", Json::parse(tree_to_json(*snap.scene.inputs.tree))},
                                 {"placements", std::move(placements)},
                                 {"options", options_to_json(snap.scene.options())}});
}

HttpServer::HttpServer(Service& service, std::optional<std::filesystem::path> static_dir)
    : server_(std::make_unique<httplib::Server>()) {
  if (static_dir && !server_->set_mount_point("/", static_dir->string())) {
    throw InputError(fmt::format("static directory '{}' does not exist", static_dir->string()));
  }
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query(req.params.begin(), req.params.end());
    const Response r = service.handle(req.method, req.path, req.body, query);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
  server_->Patch(".*", forward);
  server_->Delete(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(fmt::format("cannot bind {}", host));
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error(fmt::format("cannot bind {}:{}", host, port));
  return port;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace spcdt
