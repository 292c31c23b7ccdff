#pragma once

#include <iosfwd>
#include <string>

#include "gcca/cca.hpp"
#include "gcca/dual.hpp"
#include "gcca/kernel.hpp"

namespace gcca {

// Textual model container. One header line carries
//   gcca-model v1 variant=<tag> dx=<n> dy=<n> d=<n> gamma=<g> epsilon=<e>
// followed by labeled vector/matrix sections in row-major order, every value
// printed with 17 significant digits so files round-trip bit-exactly.
// Dual models additionally record references to the training view files;
// kernel models record kernel specs and the kernel centering statistics.

struct StoredModel {
  std::string variant;  // cca | gcca | gdcca | gkcca
  GccaModel primal;
  DualModel dual;
  KernelModel kernel;
  std::string x_ref = "-";
  std::string y_ref = "-";
};

void save_model(const GccaModel& model, bool plain_cca, std::ostream& out);
void save_model(const DualModel& model, const std::string& x_ref, const std::string& y_ref,
                std::ostream& out);
void save_model(const KernelModel& model, const std::string& x_ref, const std::string& y_ref,
                std::ostream& out);

void save_model_file(const GccaModel& model, bool plain_cca, const std::string& path);
void save_model_file(const DualModel& model, const std::string& x_ref, const std::string& y_ref,
                     const std::string& path);
void save_model_file(const KernelModel& model, const std::string& x_ref, const std::string& y_ref,
                     const std::string& path);

StoredModel load_model(std::istream& in);
StoredModel load_model_file(const std::string& path);

}  // namespace gcca
