#include "cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "thetasing/rational.hpp"
#include "thetasing/types.hpp"

namespace cli {

using thetasing::Error;
using thetasing::ErrorCode;

namespace {

constexpr const char* kMarker = "\x01";
constexpr const char* kEscapedMarker = "\"\\u0001";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(t, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "not a number: '" + text + "'");
  }
  if (used != t.size()) throw Error(ErrorCode::InvalidInput, "not a number: '" + text + "'");
  return x;
}

double json_real(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw Error(ErrorCode::InvalidInput, "expected a number, got " + j.dump());
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

cplx parse_literal(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != ' ' && c != '\t') t += c;
  }
  if (t.empty()) throw Error(ErrorCode::InvalidInput, "empty complex number");
  const char last = t.back();
  if (last != 'i' && last != 'j') return {parse_real(t), 0.0};
  const std::string body = t.substr(0, t.size() - 1);
  // The imaginary part starts at the last sign that is not part of an exponent.
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 0;) {
    if ((body[k] == '+' || body[k] == '-') && !(k > 0 && (body[k - 1] == 'e' || body[k - 1] == 'E'))) {
      split_at = k;
      break;
    }
  }
  const std::string re_text = split_at == std::string::npos ? "" : body.substr(0, split_at);
  const std::string im_text = split_at == std::string::npos ? body : body.substr(split_at);
  double im = 0.0;
  if (im_text.empty() || im_text == "+") {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else {
    im = parse_real(im_text);
  }
  return {re_text.empty() ? 0.0 : parse_real(re_text), im};
}

}  // namespace

cplx parse_scalar(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() == 2) return {parse_real(parts[0]), parse_real(parts[1])};
  if (parts.size() != 1) throw Error(ErrorCode::InvalidInput, "expected 're,im' or a complex literal: '" + text + "'");
  return parse_literal(text);
}

CVector parse_vector(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    ordered_json j;
    try {
      j = ordered_json::parse(t);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidInput, std::string("bad vector JSON: ") + e.what());
    }
    return vector_from_json(j);
  }
  const auto parts = split(t, ',');
  CVector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_literal(parts[i]);
  return v;
}

CVector vector_from_json(const ordered_json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected a list of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (e.is_array() && e.size() == 2) {
      v(static_cast<Eigen::Index>(i)) = cplx(json_real(e[0]), json_real(e[1]));
    } else if (e.is_number()) {
      v(static_cast<Eigen::Index>(i)) = cplx(e.get<double>(), 0.0);
    } else {
      throw Error(ErrorCode::InvalidInput, "bad complex entry " + e.dump());
    }
  }
  return v;
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

CMatrix tau_from_json(const ordered_json& j) {
  if (!j.contains("g") || !j.contains("re") || !j.contains("im")) {
    throw Error(ErrorCode::InvalidInput, "period matrix JSON needs g, re and im");
  }
  const int g = j.at("g").get<int>();
  if (g < 1) throw Error(ErrorCode::InvalidInput, "g must be positive");
  CMatrix tau(g, g);
  for (const char* part : {"re", "im"}) {
    const auto& rows = j.at(part);
    if (!rows.is_array() || static_cast<int>(rows.size()) != g) {
      throw Error(ErrorCode::InvalidInput, std::string(part) + " must have g rows");
    }
    for (int r = 0; r < g; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != g) {
        throw Error(ErrorCode::InvalidInput, std::string(part) + " rows must have g entries");
      }
      for (int c = 0; c < g; ++c) {
        const double x = json_real(row[static_cast<std::size_t>(c)]);
        if (part[0] == 'r') {
          tau(r, c) = cplx(x, 0.0);
        } else {
          tau(r, c) += cplx(0.0, x);
        }
      }
    }
  }
  return tau;
}

namespace {

thetasing::QMat rational_matrix(const ordered_json& rows, int size, const char* name) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != size) {
    throw Error(ErrorCode::InvalidInput, std::string(name) + " must have n+1 rows");
  }
  thetasing::QMat m(size, size);
  for (int r = 0; r < size; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != size) {
      throw Error(ErrorCode::InvalidInput, std::string(name) + " rows must have n+1 entries");
    }
    for (int c = 0; c < size; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_string()) {
        m(r, c) = thetasing::parse_rational(e.get<std::string>());
      } else if (e.is_number_integer()) {
        m(r, c) = thetasing::Rational(e.get<long>());
      } else {
        throw Error(ErrorCode::InvalidInput, "pencil entries must be integers or \"p/q\" strings");
      }
    }
  }
  return m;
}

}  // namespace

thetasing::Pencil pencil_from_json(const ordered_json& j) {
  if (!j.contains("n") || !j.contains("A") || !j.contains("B")) {
    throw Error(ErrorCode::InvalidInput, "pencil JSON needs n, A and B");
  }
  const int n = j.at("n").get<int>();
  if (n < 1) throw Error(ErrorCode::InvalidInput, "n must be at least 1");
  return thetasing::Pencil(rational_matrix(j.at("A"), n + 1, "A"), rational_matrix(j.at("B"), n + 1, "B"));
}

ordered_json pencil_to_json(const thetasing::Pencil& p) {
  return ordered_json{{"n", p.n}, {"A", to_json(p.A)}, {"B", to_json(p.B)}};
}

std::vector<CVector> vectors_from_json(const ordered_json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected a list of complex vectors");
  std::vector<CVector> out;
  for (const auto& v : j) out.push_back(vector_from_json(v));
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::string(kMarker) + format_double(x);
}

ordered_json to_json(cplx z) { return ordered_json::array({num(z.real()), num(z.imag())}); }

ordered_json to_json(const CVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

ordered_json to_json(const CMatrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

ordered_json to_json(const thetasing::QVec& v) {
  ordered_json out = ordered_json::array();
  for (const auto& q : v) out.push_back(thetasing::format_rational(q));
  return out;
}

ordered_json to_json(const thetasing::QMat& m) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < m.rows; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(thetasing::format_rational(m(i, j)));
    out.push_back(row);
  }
  return out;
}

ordered_json to_json(const thetasing::PVec& v) {
  ordered_json out = ordered_json::array();
  for (const auto& p : v) out.push_back(p.to_string());
  return out;
}

ordered_json to_json(const thetasing::Quadric& q) {
  return ordered_json{{"matrix", to_json(q.mat)}, {"scale", num(q.scale)}, {"indeterminate", q.indeterminate}};
}

std::string dump(const ordered_json& j) {
  const std::string raw = j.dump();
  std::string out;
  out.reserve(raw.size());
  const std::string marker = kEscapedMarker;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const std::size_t hit = raw.find(marker, pos);
    if (hit == std::string::npos) {
      out.append(raw, pos, std::string::npos);
      break;
    }
    out.append(raw, pos, hit - pos);
    const std::size_t start = hit + marker.size();
    const std::size_t close = raw.find('"', start);
    out.append(raw, start, close - start);
    pos = close + 1;
  }
  return out;
}

}  // namespace cli
