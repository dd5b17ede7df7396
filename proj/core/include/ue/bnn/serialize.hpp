#pragma once

#include <filesystem>
#include <iosfwd>

#include "ue/bnn/hmc.hpp"
#include "ue/bnn/mean_field.hpp"

namespace ue::io {

// Tensors: mu, rho (both flat).
void save_mean_field(const bnn::MeanFieldPosterior& q, std::ostream& out);
bnn::MeanFieldPosterior load_mean_field(std::istream& in);
void save_mean_field(const bnn::MeanFieldPosterior& q, const std::filesystem::path& path);
bnn::MeanFieldPosterior load_mean_field(const std::filesystem::path& path);

// Tensors: [accept_rate, burn_in_accept_rate, K], energies, accept flags,
// then one flat tensor per retained sample.
void save_chain(const bnn::PosteriorChain& c, std::ostream& out);
bnn::PosteriorChain load_chain(std::istream& in);
void save_chain(const bnn::PosteriorChain& c, const std::filesystem::path& path);
bnn::PosteriorChain load_chain(const std::filesystem::path& path);

}  // namespace ue::io
