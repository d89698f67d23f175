// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#include "se3d/scene.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "se3d/errors.hpp"

namespace se3d {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view tok, int line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError("scene line " + std::to_string(line_no) +
                     ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string scene_to_text(const Scene& scene) {
  std::string out;
  for (const ScenePoint& p : scene.points) {
    out += "P ";
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += ' ';
    out += format_double(p.z);
    out += ' ';
    out += format_double(p.intensity);
    out += '\n';
  }
  for (const ObjectLabel& lab : scene.labels) {
    out += "L ";
    out += lab.klass;
    for (double v : {lab.box.cx, lab.box.cy, lab.box.cz, lab.box.w, lab.box.l,
                     lab.box.h, lab.box.r, lab.truncation}) {
      out += ' ';
      out += format_double(v);
    }
    out += ' ';
    out += std::to_string(lab.occlusion);
    out += ' ';
    out += format_double(lab.bbox_height_px);
    out += '\n';
  }
  return out;
}

Scene scene_from_text(std::string_view text) {
  Scene scene;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "P") {
      if (toks.size() != 5) {
        throw ParseError("scene line " + std::to_string(line_no) +
                         ": P record needs 4 numbers");
      }
      scene.points.push_back({parse_double(toks[1], line_no),
                              parse_double(toks[2], line_no),
                              parse_double(toks[3], line_no),
                              parse_double(toks[4], line_no)});
    } else if (toks[0] == "L") {
      if (toks.size() != 12) {
        throw ParseError("scene line " + std::to_string(line_no) +
                         ": L record needs class + 10 numbers");
      }
      ObjectLabel lab;
      lab.klass = std::string(toks[1]);
      lab.box.cx = parse_double(toks[2], line_no);
      lab.box.cy = parse_double(toks[3], line_no);
      lab.box.cz = parse_double(toks[4], line_no);
      lab.box.w = parse_double(toks[5], line_no);
      lab.box.l = parse_double(toks[6], line_no);
      lab.box.h = parse_double(toks[7], line_no);
      lab.box.r = parse_double(toks[8], line_no);
      lab.truncation = parse_double(toks[9], line_no);
      lab.occlusion = static_cast<int>(parse_double(toks[10], line_no));
      lab.bbox_height_px = parse_double(toks[11], line_no);
      scene.labels.push_back(std::move(lab));
    } else {
      throw ParseError("scene line " + std::to_string(line_no) +
                       ": unknown record '" + std::string(toks[0]) + "'");
    }
  }
  return scene;
}

void write_scene_text(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::string text = scene_to_text(scene);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Scene read_scene_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return scene_from_text(ss.str());
}

}  // namespace se3d
