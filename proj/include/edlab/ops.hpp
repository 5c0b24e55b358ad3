#pragma once

#include "edlab/field.hpp"

namespace edlab {

// Second-order central differences; periodic axes wrap, open axes use
// one-sided second-order stencils at the end nodes.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);

// Riemann sum times cell volume.
double integrate(const ScalarField& f);

// Forward differences on the link from node i to node i+1 of each axis.
// With `angle` set the increments are taken on the principal branch, so an
// angle field that winds around a periodic axis yields its true derivative.
// The last node of an open axis has no link and holds 0.
VectorField link_difference(const ScalarField& f, bool angle = false);

// Averages link values onto nodes with the same weights the gradient stencil
// uses, so links_to_nodes(link_difference(f)) == gradient(f).
VectorField links_to_nodes(const VectorField& links);

// Multilinear interpolation; open axes clamp to the end nodes.
double interpolate(const ScalarField& f, const Point& x);
Point interpolate(const VectorField& v, const Point& x);

void require_finite(const ScalarField& f, const char* what);
void require_finite(const VectorField& v, const char* what);
void require_same_grid(const Grid& a, const Grid& b, const char* what);

double max_abs(const ScalarField& f);
double max_value(const ScalarField& f);

}  // namespace edlab
