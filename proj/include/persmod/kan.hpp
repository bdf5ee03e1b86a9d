#pragma once

#include <utility>

#include "persmod/module.hpp"

namespace pm {

// M restricted to a subgrid Q (every axis value of Q must occur in M's grid).
GridModule restrict(const GridModule& M, const Grid& Q);
// The extension of M read off at the vertices of an arbitrary grid P.
GridModule restriction_extension(const GridModule& M, const Grid& P);
// f_P : M_P -> N_P, components read at the floor in f's grid.
ModuleMorphism morphism_restriction_extension(const ModuleMorphism& f, const Grid& P);

// M[r]: same data, grid translated by -r.
GridModule shift(const GridModule& M, const Rational& r);
// eta^M_r : M -> M[r], both refined to the union of their grids.
ModuleMorphism shift_unit(const GridModule& M, const Rational& r);

std::pair<GridModule, GridModule> common_refinement(const GridModule& M, const GridModule& N);

// Smallest subgrid Q of M's grid with M isomorphic to the extension of M|_Q:
// drops coordinates crossed only by isomorphisms and leading all-zero slices.
GridModule compress(const GridModule& M);

// Drops coordinates crossed only by identity maps and leading all-zero
// slices; the extension is unchanged.
GridModule simplify(const GridModule& M);

// True when the extensions of M and N coincide as data after refinement.
bool same_extension(const GridModule& M, const GridModule& N);

}  // namespace pm
