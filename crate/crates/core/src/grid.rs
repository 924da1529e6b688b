//! Bounded computational domain `[-X, X] x [0, Y]`, its uniform mesh and the
//! classification of grid nodes.
//!
//! The extended problem is posed on a rectangle: the physical line lives on
//! the bottom edge (`y = 0`), the extension direction points up.  The bottom
//! nodes excluding the two corners are the dynamic boundary; everything else
//! on the boundary carries a homogeneous Dirichlet condition.

use crate::error::{Error, Result};

/// Uniform mesh over `[-X, X] x [0, Y]` with `I` spatial and `K` vertical
/// subintervals.  `dx == dy` is enforced at construction; the scheme assumes
/// it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_half_width: f64,
    y_height: f64,
    i_steps: usize,
    k_steps: usize,
    dx: f64,
    dy: f64,
}

/// Role of a mesh node in the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    /// Strictly inside the rectangle; carries the five-point Laplace stencil.
    Interior,
    /// Bottom row excluding corners; updated by the explicit boundary rule.
    ActiveBottom,
    /// Lateral sides, top row and the two bottom corners; pinned to zero.
    ZeroBoundary,
}

impl GridSpec {
    /// Half-width `X` of the spatial interval `[-X, X]`.
    pub fn x_half_width(&self) -> f64 {
        self.x_half_width
    }

    /// Height `Y` of the extension direction.
    pub fn y_height(&self) -> f64 {
        self.y_height
    }

    /// Number of spatial subintervals `I`.
    pub fn i_steps(&self) -> usize {
        self.i_steps
    }

    /// Number of vertical subintervals `K`.
    pub fn k_steps(&self) -> usize {
        self.k_steps
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Abscissa of node column `i`; exact at both endpoints.
    pub fn x(&self, i: usize) -> f64 {
        // X * (2i - I)/I instead of i*dx - X so x(0) == -X and x(I) == X
        // hold exactly in floating point.
        self.x_half_width * ((2.0 * i as f64 - self.i_steps as f64) / self.i_steps as f64)
    }

    /// Ordinate of node row `k`; exact at both endpoints.
    pub fn y(&self, k: usize) -> f64 {
        self.y_height * (k as f64 / self.k_steps as f64)
    }

    /// Total number of mesh nodes, `(I+1)*(K+1)`.
    pub fn node_count(&self) -> usize {
        (self.i_steps + 1) * (self.k_steps + 1)
    }

    /// Flat storage index of node `(i, k)`: row-major by `k` then `i`,
    /// bottom row first.  Fixed for all file outputs.
    pub fn node_index(&self, i: usize, k: usize) -> usize {
        k * (self.i_steps + 1) + i
    }
}

/// Builds the mesh, checking extents and the `dx == dy` requirement.
pub fn build_grid(x_half_width: f64, y_height: f64, i_steps: usize, k_steps: usize) -> Result<GridSpec> {
    if !(x_half_width > 0.0 && x_half_width.is_finite()) || !(y_height > 0.0 && y_height.is_finite()) {
        return Err(Error::InvalidExtent(format!(
            "domain extents must be positive and finite, got X = {x_half_width}, Y = {y_height}"
        )));
    }
    if i_steps < 2 || k_steps < 2 {
        return Err(Error::InvalidExtent(format!(
            "need at least 2 subintervals per direction, got I = {i_steps}, K = {k_steps}"
        )));
    }
    let dx = 2.0 * x_half_width / i_steps as f64;
    let dy = y_height / k_steps as f64;
    // Equal within one unit of floating representation.
    if (dx - dy).abs() > dx.abs() * f64::EPSILON {
        return Err(Error::MeshAnisotropy { dx, dy });
    }
    Ok(GridSpec {
        x_half_width,
        y_height,
        i_steps,
        k_steps,
        dx,
        dy,
    })
}

/// Classifies node `(i, k)`.
pub fn classify(grid: &GridSpec, i: usize, k: usize) -> Result<NodeClass> {
    if i > grid.i_steps || k > grid.k_steps {
        return Err(Error::IndexOutOfRange {
            i,
            k,
            max_i: grid.i_steps,
            max_k: grid.k_steps,
        });
    }
    let inner_column = i > 0 && i < grid.i_steps;
    Ok(if inner_column && k == 0 {
        NodeClass::ActiveBottom
    } else if inner_column && k < grid.k_steps {
        NodeClass::Interior
    } else {
        NodeClass::ZeroBoundary
    })
}

/// Half-width for the growing-domain mode: the smallest grid-commensurate
/// `X` with `X >= K_dom / dx`.  Rounding up keeps the lateral tail bound
/// valid while making `X / dx` integral so the mesh closes exactly.
pub fn sized_half_width(dx: f64, k_dom: f64) -> f64 {
    assert!(dx > 0.0 && k_dom > 0.0, "dx and K_dom must be positive");
    let steps = (k_dom / (dx * dx)).ceil();
    steps * dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_anisotropic_mesh() {
        // dx = 0.5, dy = 1/3
        match build_grid(1.0, 1.0, 4, 3) {
            Err(Error::MeshAnisotropy { .. }) => {}
            other => panic!("expected MeshAnisotropy, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_extents() {
        assert!(matches!(build_grid(0.0, 1.0, 2, 2), Err(Error::InvalidExtent(_))));
        assert!(matches!(build_grid(1.0, -1.0, 2, 2), Err(Error::InvalidExtent(_))));
        assert!(matches!(build_grid(1.0, 1.0, 1, 2), Err(Error::InvalidExtent(_))));
    }

    #[test]
    fn reference_domain_has_unit_spacing() {
        let g = build_grid(100.0, 100.0, 200, 100).unwrap();
        assert_eq!(g.dx(), 1.0);
        assert_eq!(g.dy(), 1.0);
        assert_eq!(g.node_count(), 201 * 101);
    }

    #[test]
    fn smallest_legal_grid_has_one_interior_node() {
        let g = build_grid(0.5, 1.0, 2, 2).unwrap();
        let mut interior = Vec::new();
        for i in 0..=2 {
            for k in 0..=2 {
                if classify(&g, i, k).unwrap() == NodeClass::Interior {
                    interior.push((i, k));
                }
            }
        }
        assert_eq!(interior, vec![(1, 1)]);
        assert_eq!(g.x(1), 0.0);
        assert_eq!(g.y(1), 0.5);
    }

    #[test]
    fn classification_examples() {
        let g = build_grid(2.0, 3.0, 4, 3).unwrap();
        assert_eq!(classify(&g, 0, 0).unwrap(), NodeClass::ZeroBoundary);
        assert_eq!(classify(&g, 1, 0).unwrap(), NodeClass::ActiveBottom);
        assert_eq!(classify(&g, 2, 1).unwrap(), NodeClass::Interior);
        assert!(matches!(
            classify(&g, 5, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn endpoints_are_exact() {
        for (x, y, i, k) in [(1.0, 2.0, 3, 3), (0.7, 1.4, 5, 5), (100.0, 100.0, 200, 100)] {
            let g = build_grid(x, y, i, k).unwrap();
            assert_eq!(g.x(0), -x);
            assert_eq!(g.x(i), x);
            assert_eq!(g.y(0), 0.0);
            assert_eq!(g.y(k), y);
        }
    }

    #[test]
    fn nodes_are_affine_in_index() {
        let g = build_grid(3.0, 4.0, 6, 4).unwrap();
        for i in 0..6 {
            assert!((g.x(i + 1) - g.x(i) - g.dx()).abs() < 1e-14);
        }
        for k in 0..4 {
            assert!((g.y(k + 1) - g.y(k) - g.dy()).abs() < 1e-14);
        }
    }

    #[test]
    fn class_counts_exhaustive() {
        // (I-1) active bottom nodes, (I-1)(K-1) interior nodes, the rest zero.
        for i_steps in 2..=16_usize {
            for k_steps in 2..=16_usize {
                let g = build_grid(1.0, k_steps as f64 / i_steps as f64 * 2.0, i_steps, k_steps)
                    .unwrap();
                let (mut interior, mut bottom, mut zero) = (0, 0, 0);
                for i in 0..=i_steps {
                    for k in 0..=k_steps {
                        match classify(&g, i, k).unwrap() {
                            NodeClass::Interior => interior += 1,
                            NodeClass::ActiveBottom => bottom += 1,
                            NodeClass::ZeroBoundary => zero += 1,
                        }
                    }
                }
                assert_eq!(bottom, i_steps - 1);
                assert_eq!(interior, (i_steps - 1) * (k_steps - 1));
                assert_eq!(zero, g.node_count() - bottom - interior);
            }
        }
    }

    #[test]
    fn sized_half_width_examples() {
        assert_eq!(sized_half_width(0.5, 10.0), 20.0);
        assert_eq!(sized_half_width(1.0, 100.0), 100.0);
        // dx = 0.3: ceil(10 / 0.09) * 0.3 = 112 * 0.3
        let x = sized_half_width(0.3, 10.0);
        assert!((x - 33.6).abs() < 1e-12);
    }

    #[test]
    fn sized_half_width_satisfies_bound_and_closes_grid() {
        // Oracle: X >= K_dom/dx and X/dx integral.
        let cases = [(0.5, 10.0), (1.0, 100.0), (0.3, 10.0), (0.7, 3.0), (16.0, 718_400.0)];
        for (dx, k_dom) in cases {
            let x = sized_half_width(dx, k_dom);
            assert!(x >= k_dom / dx - 1e-9 * x, "X = {x} < K_dom/dx for dx={dx}");
            let steps = x / dx;
            assert!((steps - steps.round()).abs() < 1e-9, "X/dx not integral for dx={dx}");
            // ceil adds at most one step
            assert!(x <= k_dom / dx + 2.0 * dx);
        }
    }
}
