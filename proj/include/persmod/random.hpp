#pragma once

#include <cstdint>
#include <random>

#include "persmod/module.hpp"

namespace pm {

// Random valid module on the regular grid {0,...,size-1}^n with dims <= max_dim.
// Steps into each vertex are drawn from the space of choices that commute with
// all squares below it, so the result always validates.
GridModule random_module(std::size_t n, std::size_t size, std::size_t max_dim, std::uint64_t seed,
                         const Field& F = Field());
// Same generator on an arbitrary grid.
GridModule random_module_on(const Grid& grid, std::size_t max_dim, std::uint64_t seed,
                            const Field& F = Field());

Matrix random_matrix(std::size_t r, std::size_t c, const Field& F, std::mt19937_64& rng);
Matrix random_invertible(std::size_t n, const Field& F, std::mt19937_64& rng);
// M transported along random invertible matrices at every vertex.
GridModule random_basis_change(const GridModule& M, std::uint64_t seed);

}  // namespace pm
