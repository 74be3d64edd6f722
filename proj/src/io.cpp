#include "revpref/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace revpref {

namespace {

using nlohmann::json;

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& token, const std::string& origin,
                    std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(origin + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": '" + token +
                     "' is not a number");
  }
  return value;
}

void require_positive(double v, const std::string& origin, std::size_t row,
                      std::size_t col) {
  if (!(v > 0.0)) {
    throw ParseError(origin + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) +
                     ": values must be strictly positive");
  }
}

NamedDataset parse_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0, m = 0;
  std::vector<Observation> obs;
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (row == 1) {
      width = cells.size();
      if (width < 3 || width % 2 == 0) {
        throw ParseError(origin + ": header must be id,q1..qm,p1..pm");
      }
      m = (width - 1) / 2;
      continue;
    }
    if (cells.size() != width) {
      throw ParseError(origin + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(width));
    }
    std::vector<double> q(m), p(m);
    for (std::size_t k = 0; k < m; ++k) {
      q[k] = parse_double(cells[1 + k], origin, row, 2 + k);
      require_positive(q[k], origin, row, 2 + k);
      p[k] = parse_double(cells[1 + m + k], origin, row, 2 + m + k);
      require_positive(p[k], origin, row, 2 + m + k);
    }
    obs.push_back({static_cast<int>(obs.size()), Bundle(std::move(q)),
                   PriceVector(std::move(p))});
    ids.push_back(cells[0]);
  }
  if (obs.empty()) {
    throw ParseError(origin + ": no observation rows");
  }
  return {Dataset(std::move(obs)), std::move(ids)};
}

NamedDataset parse_json_dataset(const std::string& text,
                                const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    const std::size_t m = doc.at("dimension").get<std::size_t>();
    std::vector<Observation> obs;
    std::vector<std::string> ids;
    for (const json& o : doc.at("observations")) {
      std::vector<double> q = o.at("quantities").get<std::vector<double>>();
      std::vector<double> p = o.at("prices").get<std::vector<double>>();
      if (q.size() != m || p.size() != m) {
        throw ParseError(origin + ": observation '" +
                         o.at("id").get<std::string>() +
                         "' does not match dimension " + std::to_string(m));
      }
      for (double v : q) {
        if (!(v > 0.0)) {
          throw ParseError(origin + ": quantities must be strictly positive");
        }
      }
      for (double v : p) {
        if (!(v > 0.0)) {
          throw ParseError(origin + ": prices must be strictly positive");
        }
      }
      obs.push_back({static_cast<int>(obs.size()), Bundle(std::move(q)),
                     PriceVector(std::move(p))});
      ids.push_back(o.at("id").get<std::string>());
    }
    return {Dataset(std::move(obs)), std::move(ids)};
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FileFormat infer_format(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  if (dot != std::string::npos && path.substr(dot) == ".json") {
    return FileFormat::Json;
  }
  return FileFormat::Csv;
}

NamedDataset parse_dataset_text(const std::string& text, FileFormat format,
                                const std::string& origin) {
  return format == FileFormat::Csv ? parse_csv(text, origin)
                                   : parse_json_dataset(text, origin);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

NamedDataset parse_dataset(const std::string& path, FileFormat format) {
  return parse_dataset_text(read_file(path), format, path);
}

NamedDataset parse_dataset(const std::string& path) {
  return parse_dataset(path, infer_format(path));
}

std::string serialize_dataset(const NamedDataset& named, FileFormat format) {
  const Dataset& data = named.data;
  if (named.ids.size() != data.size()) {
    throw InputError("serialize_dataset: id count mismatch");
  }
  if (format == FileFormat::Csv) {
    std::string out = "id";
    for (std::size_t k = 1; k <= data.dimension(); ++k) {
      out += ",q" + std::to_string(k);
    }
    for (std::size_t k = 1; k <= data.dimension(); ++k) {
      out += ",p" + std::to_string(k);
    }
    out += "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      out += named.ids[i];
      for (std::size_t k = 0; k < data.dimension(); ++k) {
        out += "," + format_full(data[i].bundle[k]);
      }
      for (std::size_t k = 0; k < data.dimension(); ++k) {
        out += "," + format_full(data[i].prices[k]);
      }
      out += "\n";
    }
    return out;
  }
  json doc;
  doc["dimension"] = data.dimension();
  doc["observations"] = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    json o;
    o["id"] = named.ids[i];
    o["quantities"] = data[i].bundle.values();
    o["prices"] = data[i].prices.values();
    doc["observations"].push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

bool looks_like_instance(const std::string& text) {
  const std::size_t at = text.find_first_not_of(" \t\r\n");
  if (at == std::string::npos || text[at] != '{') return false;
  return text.find("\"sources\"") != std::string::npos;
}

TransportInstance parse_instance_text(const std::string& text,
                                      const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    if (doc.value("kernel", "inner") != "inner") {
      throw ParseError(origin + ": only the 'inner' kernel is file-addressable");
    }
    std::vector<Bundle> sources;
    std::vector<PriceVector> targets;
    std::vector<double> mu, nu;
    for (const json& s : doc.at("sources")) {
      mu.push_back(s.at("weight").get<double>());
      sources.emplace_back(s.at("coordinates").get<std::vector<double>>());
    }
    for (const json& t : doc.at("targets")) {
      nu.push_back(t.at("weight").get<double>());
      targets.emplace_back(t.at("coordinates").get<std::vector<double>>());
    }
    return TransportInstance(std::move(sources), std::move(mu),
                             std::move(targets), std::move(nu));
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

TransportInstance parse_instance(const std::string& path) {
  return parse_instance_text(read_file(path), path);
}

}  // namespace revpref
