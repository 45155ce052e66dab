#include "usco/io.hpp"

#include <charconv>
#include <cstdio>

namespace usco::io {

RecordReader::RecordReader(const std::string& path, const std::string& expected_format)
    : path_(path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records_.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  require(in.eof(), ErrorKind::Io, "read error on '" + path + "'");
  require(!records_.empty(), ErrorKind::Format, path + ": empty file, missing header");
  const auto& h = records_.front();
  try {
    header_ = {h.at("format").get<std::string>(), h.at("version").get<int>(),
               h.at("family").get<std::string>()};
  } catch (const Json::exception& e) {
    fail(ErrorKind::Format, path + ": malformed header: " + e.what());
  }
  require(header_.format == expected_format, ErrorKind::Format,
          path + ": field 'format' is '" + header_.format + "', expected '" + expected_format + "'");
  require(header_.version == kFormatVersion, ErrorKind::Format,
          path + ": field 'version' is " + std::to_string(header_.version) + ", expected " +
              std::to_string(kFormatVersion));
  next_ = 1;
}

const Json& RecordReader::next(const std::string& what) {
  require(next_ < records_.size(), ErrorKind::Format, path_ + ": truncated file, missing " + what);
  return records_[next_++];
}

std::string peek_family(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::string line;
  require(bool(std::getline(in, line)), ErrorKind::Format, path + ": empty file, missing header");
  try {
    return Json::parse(line).at("family").get<std::string>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::Format, path + ": malformed header: " + e.what());
  }
}

RecordWriter::RecordWriter(const std::string& path, const std::string& format,
                           std::string_view family)
    : path_(path), out_(path) {
  require(bool(out_), ErrorKind::Io, "cannot open '" + path + "' for writing");
  write({{"format", format}, {"version", kFormatVersion}, {"family", std::string(family)}});
}

void RecordWriter::write(const Json& record) {
  out_ << record.dump() << '\n';
  require(bool(out_), ErrorKind::Io, "write error on '" + path_ + "'");
}

void RecordWriter::close() {
  out_.close();
  require(!out_.fail(), ErrorKind::Io, "write error on '" + path_ + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::uint64_t parse_base(const Json& j, const std::string& field, int base) {
  require(j.is_string(), ErrorKind::Format, "field '" + field + "' must be a string");
  const auto& s = j.get_ref<const std::string&>();
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
  require(!s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::Format,
          "field '" + field + "' is not a valid 64-bit value");
  return v;
}

}  // namespace

std::uint64_t parse_hex64(const Json& j, const std::string& field) { return parse_base(j, field, 16); }
std::uint64_t parse_u64(const Json& j, const std::string& field) { return parse_base(j, field, 10); }

Json trainer_to_json(const TrainerParams& p) {
  return {{"c_reg", p.c_reg},     {"eta", p.eta},
          {"margin_factor", p.margin_factor}, {"tol", p.tol},
          {"max_outer_iter", p.max_outer_iter}, {"qp_tol", p.qp_tol},
          {"qp_max_iter", p.qp_max_iter}, {"prune_after", p.prune_after},
          {"normalize_features", p.normalize_features}};
}

TrainerParams trainer_from_json(const Json& j) {
  TrainerParams p;
  p.c_reg = j.at("c_reg").get<double>();
  p.eta = j.at("eta").get<double>();
  p.margin_factor = j.at("margin_factor").get<double>();
  p.tol = j.at("tol").get<double>();
  p.max_outer_iter = j.at("max_outer_iter").get<int>();
  p.qp_tol = j.at("qp_tol").get<double>();
  p.qp_max_iter = j.at("qp_max_iter").get<std::int64_t>();
  p.prune_after = j.at("prune_after").get<int>();
  p.normalize_features = j.at("normalize_features").get<bool>();
  validate(p);
  return p;
}

}  // namespace usco::io
