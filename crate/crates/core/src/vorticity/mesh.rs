//! Closed oriented polyhedral surfaces in `(k1, k2, μ)` space.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("face {face} has fewer than three vertices")]
    DegenerateFace { face: usize },
    #[error("face {face} references vertex {vertex} which does not exist")]
    BadIndex { face: usize, vertex: usize },
    #[error("directed edge {from}->{to} occurs {count} times")]
    RepeatedEdge {
        from: usize,
        to: usize,
        count: usize,
    },
    #[error("edge {from}->{to} has no oppositely oriented partner")]
    OpenEdge { from: usize, to: usize },
    #[error("Euler characteristic is {chi}, expected 2")]
    NotASphere { chi: i64 },
}

/// Oriented closed surface; faces list vertex indices counter-clockwise as
/// seen from outside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedSurfaceMesh<T> {
    pub vertices: Vec<[T; 3]>,
    pub faces: Vec<Vec<usize>>,
}

impl<T: Real> ClosedSurfaceMesh<T> {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.faces
            .iter()
            .flat_map(|f| (0..f.len()).map(move |i| (f[i], f[(i + 1) % f.len()])))
    }

    pub fn edge_count(&self) -> usize {
        self.directed_edges().count() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Checks that every directed edge appears exactly once and is matched
    /// by its reverse, and that the surface is a sphere.
    pub fn validate(&self) -> Result<(), MeshError> {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, f) in self.faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(MeshError::DegenerateFace { face: i });
            }
            if let Some(&v) = f.iter().find(|&&v| v >= self.vertices.len()) {
                return Err(MeshError::BadIndex { face: i, vertex: v });
            }
        }
        for e in self.directed_edges() {
            *counts.entry(e).or_default() += 1;
        }
        let mut edges: Vec<_> = counts.iter().collect();
        edges.sort();
        for (&(from, to), &count) in edges {
            if count != 1 {
                return Err(MeshError::RepeatedEdge { from, to, count });
            }
            if !counts.contains_key(&(to, from)) {
                return Err(MeshError::OpenEdge { from, to });
            }
        }
        let chi = self.euler_characteristic();
        if chi != 2 {
            return Err(MeshError::NotASphere { chi });
        }
        Ok(())
    }

    /// Same surface with the opposite orientation.
    pub fn reversed(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            faces: self
                .faces
                .iter()
                .map(|f| f.iter().rev().copied().collect())
                .collect(),
        }
    }

    pub fn translated(&self, by: [T; 3]) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0] + by[0], v[1] + by[1], v[2] + by[2]])
                .collect(),
            faces: self.faces.clone(),
        }
    }

    /// Vector area `½ Σ v_i × v_{i+1}` of one face.
    pub fn face_vector_area(&self, face: usize) -> [T; 3] {
        let f = &self.faces[face];
        let mut a = [T::zero(); 3];
        for i in 0..f.len() {
            let p = self.vertices[f[i]];
            let q = self.vertices[f[(i + 1) % f.len()]];
            a[0] += p[1] * q[2] - p[2] * q[1];
            a[1] += p[2] * q[0] - p[0] * q[2];
            a[2] += p[0] * q[1] - p[1] * q[0];
        }
        a.map(|x| x * T::lit(0.5))
    }

    /// Sum of the vector areas of all faces; zero for a closed surface.
    pub fn total_vector_area(&self) -> [T; 3] {
        (0..self.faces.len()).fold([T::zero(); 3], |acc, i| {
            let a = self.face_vector_area(i);
            [acc[0] + a[0], acc[1] + a[1], acc[2] + a[2]]
        })
    }

    /// Signed volume enclosed; positive for outward orientation.
    pub fn signed_volume(&self) -> T {
        let mut vol = T::zero();
        for f in &self.faces {
            let p0 = self.vertices[f[0]];
            for i in 1..f.len() - 1 {
                let p = self.vertices[f[i]];
                let q = self.vertices[f[i + 1]];
                vol += p0[0] * (p[1] * q[2] - p[2] * q[1]) - p0[1] * (p[0] * q[2] - p[2] * q[0])
                    + p0[2] * (p[0] * q[1] - p[1] * q[0]);
            }
        }
        vol / T::lit(6.0)
    }
}

/// Boundary of the box `center ± half_widths`, each face split into
/// `subdivisions²` quads.
pub fn build_cube_mesh<T: Real>(
    center: [T; 3],
    half_widths: [T; 3],
    subdivisions: usize,
) -> ClosedSurfaceMesh<T> {
    assert!(subdivisions >= 1, "subdivisions must be at least 1");
    assert!(
        half_widths.iter().all(|&h| h > T::zero()),
        "half widths must be positive"
    );
    let s = subdivisions as i64;
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vertex = |p: [i64; 3]| -> usize {
        *index.entry(p).or_insert_with(|| {
            let coord = |a: usize| center[a] + half_widths[a] * (T::int(2 * p[a] - s) / T::int(s));
            vertices.push([coord(0), coord(1), coord(2)]);
            vertices.len() - 1
        })
    };
    let mut faces = Vec::with_capacity(6 * (s * s) as usize);
    for a in 0..3 {
        let b = (a + 1) % 3;
        let c = (a + 2) % 3;
        for level in [0, s] {
            for i in 0..s {
                for j in 0..s {
                    let at = |di: i64, dj: i64| {
                        let mut p = [0i64; 3];
                        p[a] = level;
                        p[b] = i + di;
                        p[c] = j + dj;
                        p
                    };
                    let mut quad = vec![
                        vertex(at(0, 0)),
                        vertex(at(1, 0)),
                        vertex(at(1, 1)),
                        vertex(at(0, 1)),
                    ];
                    if level == 0 {
                        quad.reverse();
                    }
                    faces.push(quad);
                }
            }
        }
    }
    ClosedSurfaceMesh { vertices, faces }
}

/// Surface of the cylinder `|q − center| ≤ radius`, `|μ| ≤ mu_max`:
/// a side wall of `n_theta × n_mu` quads and two caps of `n_radial_cap`
/// rings each, closed by triangles at the axis.
pub fn build_cylinder_mesh<T: Real>(
    center: [T; 2],
    radius: T,
    mu_max: T,
    n_theta: usize,
    n_mu: usize,
    n_radial_cap: usize,
) -> ClosedSurfaceMesh<T> {
    assert!(
        radius > T::zero() && mu_max > T::zero(),
        "radius and mu_max must be positive"
    );
    assert!(
        n_theta >= 3 && n_mu >= 1 && n_radial_cap >= 1,
        "resolution too small"
    );
    let mut vertices = Vec::new();
    let angle = |t: usize| T::TAU() * T::int(t as i64) / T::int(n_theta as i64);
    let point = |r: T, t: usize, mu: T| {
        let (s, c) = angle(t).sin_cos();
        [center[0] + r * c, center[1] + r * s, mu]
    };
    // Wall rings j = 0..=n_mu, bottom to top.
    let wall = |j: usize, t: usize| j * n_theta + t % n_theta;
    for j in 0..=n_mu {
        let mu = -mu_max + T::lit(2.0) * mu_max * T::int(j as i64) / T::int(n_mu as i64);
        for t in 0..n_theta {
            vertices.push(point(radius, t, mu));
        }
    }
    // Cap rings i = 1..n_radial_cap − 1 (ring n_radial_cap is the wall rim).
    let cap_ring = |mu: T, rim_ring: usize, vertices: &mut Vec<[T; 3]>| {
        let base = vertices.len();
        for i in 1..n_radial_cap {
            let r = radius * T::int(i as i64) / T::int(n_radial_cap as i64);
            for t in 0..n_theta {
                vertices.push(point(r, t, mu));
            }
        }
        vertices.push([center[0], center[1], mu]);
        let centre = vertices.len() - 1;
        move |i: usize, t: usize| -> usize {
            if i == n_radial_cap {
                wall(rim_ring, t)
            } else if i == 0 {
                centre
            } else {
                base + (i - 1) * n_theta + t % n_theta
            }
        }
    };
    let top = cap_ring(mu_max, n_mu, &mut vertices);
    let bottom = cap_ring(-mu_max, 0, &mut vertices);
    let mut faces = Vec::new();
    for j in 0..n_mu {
        for t in 0..n_theta {
            faces.push(vec![
                wall(j, t),
                wall(j, t + 1),
                wall(j + 1, t + 1),
                wall(j + 1, t),
            ]);
        }
    }
    for (cap, outward_up) in [(&top, true), (&bottom, false)] {
        for t in 0..n_theta {
            let mut tri = vec![cap(0, t), cap(1, t), cap(1, t + 1)];
            if !outward_up {
                tri.reverse();
            }
            faces.push(tri);
            for i in 1..n_radial_cap {
                let mut quad = vec![cap(i, t), cap(i + 1, t), cap(i + 1, t + 1), cap(i, t + 1)];
                if !outward_up {
                    quad.reverse();
                }
                faces.push(quad);
            }
        }
    }
    ClosedSurfaceMesh { vertices, faces }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_combinatorics() {
        let m = build_cube_mesh([0.0f64, 0.0, 0.0], [1.0, 1.0, 1.0], 1);
        assert_eq!(
            (m.vertex_count(), m.face_count(), m.edge_count()),
            (8, 6, 12)
        );
        assert_eq!(m.euler_characteristic(), 2);
        m.validate().unwrap();
        assert!((m.signed_volume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn refined_cube() {
        let m = build_cube_mesh([0.5f64, -0.2, 0.1], [0.3, 0.4, 0.2], 4);
        assert_eq!(m.face_count(), 96);
        m.validate().unwrap();
        let a = m.total_vector_area();
        assert!(a.iter().all(|x| x.abs() < 1e-12));
        assert!(m.signed_volume() > 0.0);
        assert!(m.reversed().signed_volume() < 0.0);
    }

    #[test]
    fn cylinder_closed() {
        for (nt, nm, nc) in [(16, 4, 4), (3, 1, 1), (7, 2, 3)] {
            let m = build_cylinder_mesh([0.0f64, 0.0], 1.0, 0.5, nt, nm, nc);
            m.validate().unwrap();
            assert!(m.signed_volume() > 0.0);
            assert!(m.total_vector_area().iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn open_surface_rejected() {
        let mut m = build_cube_mesh([0.0f64; 3], [1.0; 3], 1);
        m.faces.pop();
        assert!(matches!(m.validate(), Err(MeshError::OpenEdge { .. })));
    }
}
