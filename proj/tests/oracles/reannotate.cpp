#include "reannotate.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oracle {

namespace {

// The generated corpora never quote fields, so a plain split is enough.
std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("oracle: cannot open " + file.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") rows.push_back(split_commas(line));
  }
  return rows;
}

int column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw std::runtime_error("oracle: no column " + name);
}

std::string lower_trim(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto b = out.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return out.substr(b, out.find_last_not_of(" \t") - b + 1);
}

std::optional<std::string> alignment(const std::string& raw) {
  std::string out;
  bool sep = false;
  for (char c : lower_trim(raw)) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') {
      sep = !out.empty();
      continue;
    }
    if (sep) out += '-';
    sep = false;
    out += c;
  }
  if (out.empty() || out == "unknown") return std::nullopt;
  return out;
}

struct Country {
  double lat = 0, lon = 0;
  int utc = 0;
  std::vector<double> economic, cultural;  // empty when blank
};

struct Publisher {
  std::string country;
  std::optional<std::string> alignment;
};

const char* kEconomic[] = {"Rank", "Safety-Security", "Personal-Freedom", "Governance",
                           "Social-Capital", "Investment-Environment", "Enterprise-Conditions",
                           "Market-Infrastructure", "Economic-Quality", "Living-Conditions",
                           "Health", "Education", "Natural-Environment"};
const char* kCultural[] = {"Power-Distance", "Uncertainty-Avoidance-By-Individuals",
                           "Individualistic-Cultures", "Masculinity-Femininity",
                           "Long-Term-Orientation", "Indulgence-Restraint"};

std::vector<double> block(const std::vector<std::string>& header,
                          const std::vector<std::string>& row, const char* const* names, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) {
    const auto& cell = row[static_cast<std::size_t>(column(header, names[i]))];
    if (cell.empty()) return {};
    v.push_back(std::stod(cell));
  }
  return v;
}

char cosine_label(const std::vector<double>& a, const std::vector<double>& b, double threshold) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb)) > threshold ? 'F' : 'T';
}

}  // namespace

std::vector<Verdict> reannotate(const std::filesystem::path& dir, double threshold) {
  std::map<std::string, Country> countries;
  {
    const auto rows = read_rows(dir / "countries.csv");
    const auto& h = rows.at(0);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      Country c;
      c.lat = std::stod(row[static_cast<std::size_t>(column(h, "latitude"))]);
      c.lon = std::stod(row[static_cast<std::size_t>(column(h, "longitude"))]);
      c.utc = std::stoi(row[static_cast<std::size_t>(column(h, "utc_offset"))]);
      c.economic = block(h, row, kEconomic, 13);
      c.cultural = block(h, row, kCultural, 6);
      countries[row[static_cast<std::size_t>(column(h, "country_code"))]] = c;
    }
  }

  std::map<std::string, Publisher> publishers;
  {
    const auto rows = read_rows(dir / "publishers.csv");
    const auto& h = rows.at(0);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      Publisher p;
      p.country = row[static_cast<std::size_t>(column(h, "country_code"))];
      const auto a = static_cast<std::size_t>(column(h, "political_alignment"));
      if (a < row.size()) p.alignment = alignment(row[a]);
      publishers[lower_trim(row[static_cast<std::size_t>(column(h, "publisher_uri"))])] = p;
    }
  }

  std::set<std::string> annotated;
  {
    std::ifstream in(dir / "concepts.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      if (!j.at("concepts").empty()) annotated.insert(j.at("article").get<std::string>());
    }
  }

  std::vector<Verdict> out;
  const auto rows = read_rows(dir / "pairs.csv");
  const auto& h = rows.at(0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row[static_cast<std::size_t>(column(h, "Class"))] != "Information-Propagated") continue;
    Verdict v;
    v.article_id = row[static_cast<std::size_t>(column(h, "from"))];
    v.labels.fill('D');
    const auto s = publishers.find(lower_trim(row[static_cast<std::size_t>(column(h, "from-pub-uri"))]));
    const auto t = publishers.find(lower_trim(row[static_cast<std::size_t>(column(h, "to-pub-uri"))]));
    if (s == publishers.end() || t == publishers.end() || !annotated.count(v.article_id)) {
      out.push_back(v);
      continue;
    }
    const auto cs = countries.find(s->second.country);
    const auto ct = countries.find(t->second.country);
    if (cs != countries.end() && ct != countries.end()) {
      const auto& a = cs->second;
      const auto& b = ct->second;
      if (!a.economic.empty() && !b.economic.empty()) {
        v.labels[0] = cosine_label(a.economic, b.economic, threshold);
      }
      if (!a.cultural.empty() && !b.cultural.empty()) {
        v.labels[1] = cosine_label(a.cultural, b.cultural, threshold);
      }
      const bool same_place = s->second.country == t->second.country ||
                              (std::fabs(a.lat - b.lat) <= 1e-6 && std::fabs(a.lon - b.lon) <= 1e-6);
      v.labels[2] = same_place ? 'F' : 'T';
      v.labels[3] = a.utc == b.utc ? 'F' : 'T';
    }
    if (s->second.alignment && t->second.alignment) {
      v.labels[4] = *s->second.alignment == *t->second.alignment ? 'F' : 'T';
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Verdict> read_ground_truth(const std::filesystem::path& file) {
  const auto rows = read_rows(file);
  std::vector<Verdict> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Verdict v;
    v.article_id = rows[r].at(0);
    for (std::size_t k = 0; k < 5; ++k) {
      const auto& cell = rows[r].at(k + 1);
      v.labels[k] = cell == "TRUE" ? 'T' : cell == "FALSE" ? 'F' : 'D';
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace oracle
