// Copyright 2026 The Aerovis Authors
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

#include "aerovis/cli/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cctype>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <utility>
#include <unistd.h>

#include "aerovis/gateway/gateway.hpp"
#include "aerovis/sim/simulator.hpp"
#include "aerovis/vision/blob_detector.hpp"
#include "aerovis/vision/gesture_training.hpp"
#include "aerovis/vision/model_io.hpp"

namespace aerovis::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

const std::map<std::string, std::string, std::less<>> kUsage = {
    {"connect", "connect [--host HOST] [--ports-base N]"},
    {"takeoff", "takeoff"},
    {"land", "land"},
    {"hover", "hover"},
    {"emergency", "emergency"},
    {"reset", "reset"},
    {"trim", "trim"},
    {"move", "move <right|left|up|down|forward|backward> [SPEED] [--speed SPEED]"},
    {"track", "track <start|stop>"},
    {"telemetry", "telemetry"},
    {"sim", "sim [--ports-base N] [--seed S] [--scene FILE] [--duration SEC] | sim stop"},
    {"train-gestures", "train-gestures [--seed S] [--samples N] [--epochs N] [--out FILE] [--dataset-out FILE]"},
    {"predict-gesture", "predict-gesture --model FILE (--csv FILE | --gesture NAME)"},
    {"gui",
     "gui [--host HOST] [--ports-base N] [--http-host HOST] [--http-port PORT] [--ui-dir DIR] "
     "[--duration SEC] | gui stop"},
    {"disconnect", "disconnect"},
    {"quit", "quit"},
    {"help", "help"},
};

std::string verb_list() {
  std::string s = "verbs:";
  for (const auto& [verb, usage] : kUsage) s += " " + verb;
  return s;
}

std::string usage_for(std::string_view verb) {
  const auto it = kUsage.find(verb);
  return it == kUsage.end() ? verb_list() : "usage: " + it->second;
}

struct Options {
  std::string host{kDefaultHost};
  int ports_base = kDefaultPortsBase;
  std::uint64_t seed = 7;
  std::string scene;
  std::string model;
  std::string out;
  std::string dataset_out;
  std::string csv;
  std::string gesture;
  std::string ui_dir;
  std::string http_host = "127.0.0.1";
  int http_port = gateway::kDefaultPort;
  double speed = 0.2;
  std::optional<double> positional_speed;
  std::string direction;
  std::string action;
  std::size_t samples = 328;
  std::size_t epochs = 200;
  double duration = 0.0;
  bool seed_given = false;
};

std::unique_ptr<CLI::App> make_app(Options& o) {
  auto app = std::make_unique<CLI::App>("aerovis: drone ground control, simulator and vision tools", "aerovis");
  app->require_subcommand(0, 1);
  app->footer("Run without arguments for the interactive command loop. Logging: AEROVIS_LOG=error|info|debug.");

  auto endpoint = [&o](CLI::App* sub) {
    sub->add_option("--host", o.host, "drone or simulator address");
    sub->add_option("--ports-base", o.ports_base, "navdata = N+4, video = N+5, command = N+6")
        ->check(CLI::Range(1, 65529));
  };

  endpoint(app->add_subcommand("connect", "connect to a drone or simulator and enter the command loop"));
  app->add_subcommand("takeoff", "take off and climb to hover altitude");
  app->add_subcommand("land", "land");
  app->add_subcommand("hover", "hold position");
  app->add_subcommand("emergency", "cut motors");
  app->add_subcommand("reset", "clear an emergency");
  app->add_subcommand("trim", "flat trim (on the ground)");
  auto* move = app->add_subcommand("move", "move in one direction");
  move->add_option("direction", o.direction, "right, left, up, down, forward or backward")
      ->required()
      ->check(CLI::IsMember({"right", "left", "up", "down", "forward", "backward"}));
  move->add_option("fraction", o.positional_speed, "stick fraction in (0, 1]");
  move->add_option("--speed", o.speed, "stick fraction in (0, 1]");
  app->add_subcommand("track", "start or stop visual tracking")
      ->add_option("action", o.action)
      ->required()
      ->check(CLI::IsMember({"start", "stop"}));
  app->add_subcommand("telemetry", "print the latest telemetry on one line");

  auto* sim = app->add_subcommand("sim", "run the drone simulator");
  sim->add_option("action", o.action)->check(CLI::IsMember({"stop"}));
  sim->add_option("--ports-base", o.ports_base)->check(CLI::Range(1, 65529));
  sim->add_option("--seed", o.seed);
  sim->add_option("--scene", o.scene, "key=value scene file")->check(CLI::ExistingFile);
  sim->add_option("--duration", o.duration, "stop after this many seconds (0 = until interrupted)");

  auto* train = app->add_subcommand("train-gestures", "train the gesture classifier on synthetic keypoints");
  train->add_option("--seed", o.seed);
  train->add_option("--samples", o.samples)->check(CLI::Range(6, 1000000));
  train->add_option("--epochs", o.epochs)->check(CLI::Range(1, 100000));
  train->add_option("--out", o.out, "model file to write");
  train->add_option("--dataset-out", o.dataset_out, "CSV file for the generated dataset");

  auto* predict = app->add_subcommand("predict-gesture", "classify keypoints with a trained model");
  predict->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  auto* csv = predict->add_option("--csv", o.csv, "dataset CSV to classify")->check(CLI::ExistingFile);
  auto* gesture = predict->add_option("--gesture", o.gesture, "classify the template pose of a gesture");
  csv->excludes(gesture);
  gesture->excludes(csv);
  predict->add_option("--seed", o.seed, "add template noise with this seed")
      ->each([&o](const std::string&) { o.seed_given = true; });

  auto* gui = app->add_subcommand("gui", "serve the browser ground station");
  gui->add_option("action", o.action)->check(CLI::IsMember({"stop"}));
  endpoint(gui);
  gui->add_option("--http-host", o.http_host);
  gui->add_option("--http-port", o.http_port)->check(CLI::Range(0, 65535));
  gui->add_option("--ui-dir", o.ui_dir)->check(CLI::ExistingDirectory);
  gui->add_option("--duration", o.duration);

  app->add_subcommand("disconnect", "close the session");
  app->add_subcommand("quit", "leave the command loop");
  app->add_subcommand("help", "list verbs");
  return app;
}

std::string fixed(double v, int digits) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;  // no "-0.00"
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string telemetry_line(const client::TelemetrySnapshot& t, FlightState state, const control::VisionLoop* vision) {
  std::ostringstream s;
  s << "state=" << to_string(state) << " battery=" << fixed(t.battery_percent, 1)
    << " altitude=" << fixed(t.altitude_m, 2) << " pitch=" << fixed(t.pitch_deg, 1)
    << " roll=" << fixed(t.roll_deg, 1) << " yaw=" << fixed(t.yaw_deg, 1) << " vx=" << fixed(t.vx, 2)
    << " vy=" << fixed(t.vy, 2) << " vz=" << fixed(t.vz, 2) << " mask=0x" << std::hex << std::setw(8)
    << std::setfill('0') << t.state_mask << std::dec << " link=" << (t.link_ok ? "ok" : "lost");
  if (vision) {
    s << " tracking=" << (vision->tracking() ? "on" : "off")
      << " action=" << control::to_string(vision->last().action);
  }
  return s.str();
}

std::optional<vision::Gesture> gesture_by_name(std::string_view name) {
  for (int label = 0; label < static_cast<int>(vision::kGestureClasses); ++label) {
    const auto g = *vision::gesture_from_label(label);
    if (vision::to_string(g) == name) return g;
  }
  return std::nullopt;
}

std::string train_command(const Options& o) {
  const auto dataset = vision::synth_gesture_dataset(o.samples, o.seed);
  vision::TrainConfig cfg;
  cfg.seed = o.seed;
  cfg.epochs = o.epochs;
  const auto result = vision::train_gestures(dataset, cfg);
  const auto& m = result.metrics;

  std::ostringstream s;
  s << "samples " << dataset.size() << ", seed " << o.seed << ", epochs " << o.epochs << "\n";
  s << std::left << std::setw(8) << "split" << "accuracy\n";
  s << std::setw(8) << "train" << fixed(m.train_accuracy, 4) << "\n";
  s << std::setw(8) << "val" << fixed(m.val_accuracy, 4) << "\n";
  s << std::setw(8) << "test" << fixed(m.test_accuracy, 4) << "\n";
  s << "best epoch " << m.best_epoch << ", final loss "
    << (m.loss_curve.empty() ? std::string("n/a") : fixed(m.loss_curve.back(), 6));
  if (!o.dataset_out.empty()) {
    vision::write_dataset_csv(o.dataset_out, dataset);
    s << "\ndataset written: " << o.dataset_out;
  }
  if (!o.out.empty()) {
    vision::save_model(o.out, result.params);
    s << "\nmodel written: " << o.out;
  }
  return s.str();
}

std::string predict_command(const Options& o) {
  const auto params = vision::load_model(o.model);
  std::ostringstream s;
  if (!o.csv.empty()) {
    const auto samples = vision::read_dataset_csv(o.csv);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto p = vision::predict_gesture(params, samples[i].keypoints);
      if (static_cast<int>(p.label) == samples[i].label) ++correct;
      s << i << " " << vision::to_string(p.label) << " " << fixed(p.confidence, 4) << "\n";
    }
    s << "accuracy " << fixed(samples.empty() ? 0.0 : double(correct) / double(samples.size()), 4) << " ("
      << correct << "/" << samples.size() << ")";
    return s.str();
  }
  if (o.gesture.empty()) throw CLI::ValidationError("--csv or --gesture", "one of them is required");
  const auto g = gesture_by_name(o.gesture);
  if (!g) throw CLI::ValidationError("--gesture", "unknown gesture '" + o.gesture + "'");
  auto keypoints = vision::gesture_template(*g);
  if (o.seed_given) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> noise(0.0, 0.02);
    for (auto& k : keypoints) k += noise(rng);
  }
  const auto p = vision::predict_gesture(params, keypoints);
  s << "gesture: " << vision::to_string(p.label) << " (confidence " << fixed(p.confidence, 4) << ")";
  return s.str();
}

sim::SimConfig sim_config(const Options& o, sim::SimScene& scene) {
  sim::SimConfig cfg;
  cfg.seed = o.seed;
  if (!o.scene.empty()) sim::load_scene_file(o.scene, scene, cfg);
  return cfg;
}

std::string sim_banner(const sim::Simulator& s) {
  const auto& p = s.ports();
  return "sim: running (command " + std::to_string(p.command) + ", navdata " + std::to_string(p.navdata) +
         ", video " + std::to_string(p.video) + ")";
}

void wait_for_interrupt(double duration) {
  g_interrupted.store(false);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto start = std::chrono::steady_clock::now();
  while (!g_interrupted.load()) {
    if (duration > 0 &&
        std::chrono::steady_clock::now() - start >= std::chrono::duration<double>(duration)) {
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
}

ReplResult ok(std::string text) { return {kExitOk, std::move(text), false}; }
ReplResult failed(std::string text) { return {kExitCommandError, "error: " + std::move(text), false}; }
ReplResult usage(std::string_view verb) { return {kExitUsage, usage_for(verb), false}; }

// Whitespace-separated words; double quotes group, backslash escapes inside them.
std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_word = false, quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '\\' && i + 1 < line.size()) cur += line[++i];
      else if (c == '"') quoted = false;
      else cur += c;
    } else if (c == '"') {
      quoted = in_word = true;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (in_word) out.push_back(std::exchange(cur, {}));
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote");
  if (in_word) out.push_back(std::move(cur));
  return out;
}

}  // namespace

void init_logging() {
  auto logger = spdlog::get("aerovis");
  if (!logger) logger = spdlog::stderr_color_mt("aerovis");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("AEROVIS_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else spdlog::set_level(spdlog::level::err);
}

Repl::Repl() = default;

Repl::~Repl() {
  frame_sink_.store(nullptr);
  if (gateway_) gateway_->stop();
  client_.disconnect();
  if (sim_) sim_->stop();
}

void Repl::ensure_video() {
  if (!client_.connected() || video_connected_.load()) return;
  client_.connect_video(
      [this](const vision::Frame& frame) {
        if (vision_) vision_->on_frame(frame);
        if (auto* g = frame_sink_.load()) g->publish_frame(frame);
      },
      [this](const std::string& reason) {
        video_connected_.store(false);
        spdlog::info("video closed: {}", reason);
      });
  video_connected_.store(true);
}

ReplResult Repl::execute(std::string_view line) {
  std::vector<std::string> tokens;
  try {
    tokens = tokenize(line);
  } catch (const std::invalid_argument& e) {
    return {kExitUsage, std::string(e.what()) + "; " + verb_list(), false};
  }
  if (tokens.empty()) return ok("");
  if (tokens.front() == "exit") tokens.front() = "quit";
  return dispatch(std::move(tokens));
}

ReplResult Repl::dispatch(std::vector<std::string> tokens) {
  const std::string verb = tokens.front();
  if (!kUsage.count(verb)) return {kExitUsage, "unknown verb '" + verb + "'; " + verb_list(), false};

  Options o;
  auto app = make_app(o);
  std::vector<std::string> args(tokens.rbegin(), tokens.rend());
  try {
    app->parse(args);
  } catch (const CLI::CallForHelp&) {
    return ok(usage_for(verb));
  } catch (const CLI::ParseError&) {
    return usage(verb);
  }

  try {
    if (verb == "help") return ok(verb_list());
    if (verb == "quit") return {kExitOk, "bye", true};
    if (verb == "connect") {
      const auto status = client_.connect(
          client::DroneEndpoint::with_ports_base(o.host, static_cast<std::uint16_t>(o.ports_base)));
      video_connected_.store(false);
      if (frame_sink_.load() || (vision_ && vision_->tracking())) ensure_video();
      return status == client::LinkStatus::kLinked
                 ? ok("connected: " + o.host + " link ok")
                 : ok("connected: " + o.host + " link timeout (no navdata yet)");
    }
    if (verb == "train-gestures") return ok(train_command(o));
    if (verb == "predict-gesture") return ok(predict_command(o));
    if (verb == "sim") {
      if (o.action == "stop") {
        if (!sim_) return failed("no simulator running");
        sim_->stop();
        sim_.reset();
        return ok("sim: stopped");
      }
      if (sim_) return failed("simulator already running");
      sim::SimScene scene;
      const auto cfg = sim_config(o, scene);
      sim_ = std::make_unique<sim::Simulator>(cfg, scene,
                                              sim::SimPorts::from_base(static_cast<std::uint16_t>(o.ports_base)));
      return ok(sim_banner(*sim_));
    }
    if (verb == "gui") {
      if (o.action == "stop") {
        if (!gateway_) return failed("gui not running");
        frame_sink_.store(nullptr);
        gateway_->stop();
        gateway_.reset();
        return ok("gui: stopped");
      }
      if (gateway_) return failed("gui already running");
      if (!vision_) {
        vision_ = std::make_unique<control::VisionLoop>(std::make_unique<vision::BlobDetector>(),
                                                         control::TrackerConfig{}, client_);
      }
      backend_ = std::make_unique<gateway::ClientBackend>(client_, vision_.get());
      gateway::GatewayConfig gcfg;
      gcfg.host = o.http_host;
      gcfg.port = static_cast<std::uint16_t>(o.http_port);
      if (!o.ui_dir.empty()) gcfg.ui_dir = o.ui_dir;
      auto g = std::make_unique<gateway::Gateway>(*backend_, gcfg);
      g->start();
      gateway_ = std::move(g);
      frame_sink_.store(gateway_.get());
      ensure_video();
      return ok("gui: serving http://" + gcfg.host + ":" + std::to_string(gateway_->port()) + "/");
    }

    // Everything below needs a live session.
    if (!client_.connected()) return failed("not connected");

    if (verb == "disconnect") {
      client_.disconnect();
      video_connected_.store(false);
      if (vision_) vision_->set_tracking(false);
      return ok("disconnected");
    }
    if (verb == "telemetry") return ok(telemetry_line(client_.telemetry_snapshot(), client_.state(), vision_.get()));
    if (verb == "takeoff") {
      client_.takeoff();
      if (!client_.wait_for_state(FlightState::kFlying, settle_timeout)) {
        return failed("takeoff did not complete (state: " + std::string(to_string(client_.state())) + ")");
      }
      return ok("state: Flying");
    }
    if (verb == "land") {
      client_.land();
      if (!client_.wait_for_state(FlightState::kLanded, settle_timeout)) {
        return failed("landing did not complete (state: " + std::string(to_string(client_.state())) + ")");
      }
      return ok("state: Landed");
    }
    if (verb == "hover") client_.hover();
    else if (verb == "emergency") client_.emergency();
    else if (verb == "reset") client_.reset_emergency();
    else if (verb == "trim") {
      client_.flat_trim();
      return ok("trim sent");
    } else if (verb == "move") {
      client_.move(*move_direction_from_string(o.direction), o.positional_speed.value_or(o.speed));
    } else if (verb == "track") {
      if (!vision_) {
        vision_ = std::make_unique<control::VisionLoop>(std::make_unique<vision::BlobDetector>(),
                                                         control::TrackerConfig{}, client_);
      }
      if (o.action == "start") {
        ensure_video();
        vision_->set_tracking(true);
        return ok("tracking: on");
      }
      vision_->set_tracking(false);
      return ok("tracking: off");
    }
    return ok("state: " + std::string(to_string(client_.state())));
  } catch (const StateError& e) {
    return failed(e.what());
  } catch (const CLI::ValidationError& e) {
    return {kExitUsage, usage_for(verb) + " (" + e.what() + ")", false};
  } catch (const std::exception& e) {
    return failed(e.what());
  }
}

void Repl::run(std::istream& in, std::ostream& out, bool prompt) {
  std::string line;
  for (;;) {
    if (prompt) out << "aerovis> " << std::flush;
    if (!std::getline(in, line)) break;
    const auto r = execute(line);
    if (!r.text.empty()) out << r.text << "\n" << std::flush;
    if (r.quit) break;
  }
}

int run_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  init_logging();
  Options o;
  auto app = make_app(o);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    std::string verb;
    for (int i = 1; i < argc; ++i) {
      if (argv[i][0] != '-') {
        verb = argv[i];
        break;
      }
    }
    err << usage_for(verb) << "\n";
    return kExitUsage;
  }

  const auto subs = app->get_subcommands();
  const bool interactive = static_cast<bool>(::isatty(STDIN_FILENO)) && &in == &std::cin;
  if (subs.empty()) {
    Repl repl;
    repl.run(in, out, interactive);
    return kExitOk;
  }
  const std::string verb = subs.front()->get_name();

  try {
    if (verb == "help") {
      out << app->help();
      return kExitOk;
    }
    if (verb == "quit") return kExitOk;
    if (verb == "train-gestures") {
      out << train_command(o) << "\n";
      return kExitOk;
    }
    if (verb == "predict-gesture") {
      out << predict_command(o) << "\n";
      return kExitOk;
    }
    if (verb == "connect") {
      Repl repl;
      std::ostringstream line;
      line << "connect --host " << o.host << " --ports-base " << o.ports_base;
      const auto r = repl.execute(line.str());
      (r.status == kExitOk ? out : err) << r.text << "\n";
      if (r.status != kExitOk) return r.status;
      repl.run(in, out, interactive);
      return kExitOk;
    }
    if (verb == "sim") {
      if (o.action == "stop") {
        err << "error: no simulator running\n";
        return kExitCommandError;
      }
      sim::SimScene scene;
      const auto cfg = sim_config(o, scene);
      sim::Simulator simulator(cfg, scene, sim::SimPorts::from_base(static_cast<std::uint16_t>(o.ports_base)));
      out << sim_banner(simulator) << "\n" << std::flush;
      wait_for_interrupt(o.duration);
      simulator.stop();
      out << "sim: stopped\n";
      return kExitOk;
    }
    if (verb == "gui") {
      if (o.action == "stop") {
        err << "error: gui not running\n";
        return kExitCommandError;
      }
      Repl repl;
      std::ostringstream connect;
      connect << "connect --host " << o.host << " --ports-base " << o.ports_base;
      const auto c = repl.execute(connect.str());
      (c.status == kExitOk ? out : err) << c.text << "\n";
      if (c.status != kExitOk) return c.status;
      std::ostringstream gui;
      gui << "gui --http-host " << o.http_host << " --http-port " << o.http_port;
      if (!o.ui_dir.empty()) gui << " --ui-dir " << std::quoted(o.ui_dir);
      const auto g = repl.execute(gui.str());
      (g.status == kExitOk ? out : err) << g.text << "\n" << std::flush;
      if (g.status != kExitOk) return g.status;
      wait_for_interrupt(o.duration);
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n" << usage_for(verb) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCommandError;
  }

  // Flight verbs need a session, and a one-shot invocation never has one.
  err << "error: not connected (start with 'aerovis connect' or run without arguments)\n";
  return kExitCommandError;
}

}  // namespace aerovis::cli
