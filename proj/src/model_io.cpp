#include "gcca/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace gcca {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const std::string& variant, Index dx, Index dy, Index d,
                  double gamma, double epsilon) {
  out << "gcca-model v1 variant=" << variant << " dx=" << dx << " dy=" << dy << " d=" << d
      << " gamma=" << fmt(gamma) << " epsilon=" << fmt(epsilon) << "\n";
}

void write_vec(std::ostream& out, const char* name, const Vec& v) {
  out << name << " " << v.size() << "\n";
  for (Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << fmt(v(i));
  out << "\n";
}

void write_mat(std::ostream& out, const char* name, const Mat& m) {
  out << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << fmt(m(r, c));
    out << "\n";
  }
}

void write_ref(std::ostream& out, const char* name, const std::string& ref) {
  out << name << " " << (ref.empty() ? "-" : ref) << "\n";
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool next_token(std::string& tok) { return static_cast<bool>(in_ >> tok); }

  std::string expect_token(const char* what) {
    std::string tok;
    if (!next_token(tok)) throw IoError(std::string("model file ended while reading ") + what);
    return tok;
  }

  long expect_count(const char* what) {
    const std::string tok = expect_token(what);
    try {
      return std::stol(tok);
    } catch (...) {
      throw IoError(std::string("bad count '") + tok + "' for " + what);
    }
  }

  double expect_double(const char* what) {
    const std::string tok = expect_token(what);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw IoError(std::string("bad number '") + tok + "' in " + what);
    return v;
  }

  Vec read_vec(const char* what) {
    const long n = expect_count(what);
    Vec v(n);
    for (long i = 0; i < n; ++i) v(i) = expect_double(what);
    return v;
  }

  Mat read_mat(const char* what) {
    const long rows = expect_count(what);
    const long cols = expect_count(what);
    Mat m(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) m(r, c) = expect_double(what);
    return m;
  }

 private:
  std::istream& in_;
};

std::string header_field(const std::string& header, const std::string& key) {
  const std::string needle = key + "=";
  const auto pos = header.find(needle);
  if (pos == std::string::npos) throw IoError("model header missing field " + key);
  const auto end = header.find(' ', pos);
  return header.substr(pos + needle.size(), end == std::string::npos ? end : end - pos -
                                                                                 needle.size());
}

}  // namespace

void save_model(const GccaModel& model, bool plain_cca, std::ostream& out) {
  write_header(out, plain_cca ? "cca" : "gcca", model.u.rows(), model.v.rows(), model.d,
               model.gamma, 0.0);
  write_vec(out, "x_mean", model.x_mean);
  write_vec(out, "y_mean", model.y_mean);
  write_vec(out, "singulars", model.singulars);
  write_mat(out, "u", model.u);
  write_mat(out, "v", model.v);
  out << "end\n";
}

void save_model(const DualModel& model, const std::string& x_ref, const std::string& y_ref,
                std::ostream& out) {
  write_header(out, "gdcca", model.train_x.rows(), model.train_y.rows(), model.d(), model.gamma,
               model.epsilon);
  write_ref(out, "x_ref", x_ref);
  write_ref(out, "y_ref", y_ref);
  write_vec(out, "x_mean", model.x_mean);
  write_vec(out, "y_mean", model.y_mean);
  write_vec(out, "eigvals", model.eigvals);
  write_mat(out, "a", model.a);
  write_mat(out, "b", model.b);
  out << "end\n";
}

void save_model(const KernelModel& model, const std::string& x_ref, const std::string& y_ref,
                std::ostream& out) {
  write_header(out, "gkcca", model.train_x.rows(), model.train_y.rows(), model.a.cols(),
               model.gamma, model.epsilon);
  write_ref(out, "x_ref", x_ref);
  write_ref(out, "y_ref", y_ref);
  out << "kernel_x " << to_string(model.kernel_x) << "\n";
  out << "kernel_y " << to_string(model.kernel_y) << "\n";
  write_vec(out, "singulars", model.singulars);
  write_mat(out, "a", model.a);
  write_mat(out, "b", model.b);
  if (model.stats_x.col_means.size() > 0) {
    write_vec(out, "kx_col_means", model.stats_x.col_means);
    out << "kx_grand_mean " << fmt(model.stats_x.grand_mean) << "\n";
    write_vec(out, "ky_col_means", model.stats_y.col_means);
    out << "ky_grand_mean " << fmt(model.stats_y.grand_mean) << "\n";
  }
  out << "end\n";
}

namespace {

void save_to_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  writer(out);
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace

void save_model_file(const GccaModel& model, bool plain_cca, const std::string& path) {
  save_to_file(path, [&](std::ostream& out) { save_model(model, plain_cca, out); });
}

void save_model_file(const DualModel& model, const std::string& x_ref, const std::string& y_ref,
                     const std::string& path) {
  save_to_file(path, [&](std::ostream& out) { save_model(model, x_ref, y_ref, out); });
}

void save_model_file(const KernelModel& model, const std::string& x_ref, const std::string& y_ref,
                     const std::string& path) {
  save_to_file(path, [&](std::ostream& out) { save_model(model, x_ref, y_ref, out); });
}

StoredModel load_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IoError("empty model file");
  if (header.rfind("gcca-model v1 ", 0) != 0)
    throw IoError("not a gcca model file (bad header)");

  StoredModel stored;
  stored.variant = header_field(header, "variant");
  const double gamma = std::strtod(header_field(header, "gamma").c_str(), nullptr);
  const double epsilon = std::strtod(header_field(header, "epsilon").c_str(), nullptr);
  const long d = std::stol(header_field(header, "d"));

  Reader reader(in);
  std::string section;
  KernelSpec kx_spec, ky_spec;

  auto parse_kernel_line = [&]() {
    const std::string kind = reader.expect_token("kernel kind");
    if (kind == "linear") return KernelSpec::linear();
    const std::string bw = reader.expect_token("kernel bandwidth");
    return parse_kernel(kind, bw);
  };

  while (reader.next_token(section) && section != "end") {
    if (section == "x_ref")
      stored.x_ref = reader.expect_token("x_ref");
    else if (section == "y_ref")
      stored.y_ref = reader.expect_token("y_ref");
    else if (section == "kernel_x")
      kx_spec = parse_kernel_line();
    else if (section == "kernel_y")
      ky_spec = parse_kernel_line();
    else if (section == "x_mean") {
      stored.primal.x_mean = reader.read_vec("x_mean");
      stored.dual.x_mean = stored.primal.x_mean;
    } else if (section == "y_mean") {
      stored.primal.y_mean = reader.read_vec("y_mean");
      stored.dual.y_mean = stored.primal.y_mean;
    } else if (section == "singulars") {
      stored.primal.singulars = reader.read_vec("singulars");
      stored.kernel.singulars = stored.primal.singulars;
    } else if (section == "eigvals")
      stored.dual.eigvals = reader.read_vec("eigvals");
    else if (section == "u")
      stored.primal.u = reader.read_mat("u");
    else if (section == "v")
      stored.primal.v = reader.read_mat("v");
    else if (section == "a") {
      stored.dual.a = reader.read_mat("a");
      stored.kernel.a = stored.dual.a;
    } else if (section == "b") {
      stored.dual.b = reader.read_mat("b");
      stored.kernel.b = stored.dual.b;
    } else if (section == "kx_col_means")
      stored.kernel.stats_x.col_means = reader.read_vec("kx_col_means");
    else if (section == "kx_grand_mean")
      stored.kernel.stats_x.grand_mean = reader.expect_double("kx_grand_mean");
    else if (section == "ky_col_means")
      stored.kernel.stats_y.col_means = reader.read_vec("ky_col_means");
    else if (section == "ky_grand_mean")
      stored.kernel.stats_y.grand_mean = reader.expect_double("ky_grand_mean");
    else
      throw IoError("unknown model section '" + section + "'");
  }

  stored.primal.gamma = gamma;
  stored.primal.d = d;
  stored.dual.gamma = gamma;
  stored.dual.epsilon = epsilon;
  stored.kernel.gamma = gamma;
  stored.kernel.epsilon = epsilon;
  stored.kernel.kernel_x = kx_spec;
  stored.kernel.kernel_y = ky_spec;
  return stored;
}

StoredModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_model(in);
}

}  // namespace gcca
