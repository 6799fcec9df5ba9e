//! Array layout: magnet centers, disk dimensions and clocking groups.
//!
//! Magnets are indexed from 0 here; index 0 is the magnet labelled "1" in
//! the usual 1-based numbering and is the input magnet of a grid array.
//! Grid indices run along a row first (`i = row * cols + col`), so with two
//! columns the odd labels form one column and the even labels the other.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Clocking group. Every magnet belongs to exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    I,
    II,
    III,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::I, Group::II, Group::III];

    /// Group of grid row `row` (0-based): I, II, III repeating.
    pub fn of_row(row: usize) -> Group {
        Group::ALL[row % 3]
    }

    pub fn index(self) -> usize {
        match self {
            Group::I => 0,
            Group::II => 1,
            Group::III => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Group::I => "I",
            Group::II => "II",
            Group::III => "III",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        match s.trim() {
            "I" | "1" => Some(Group::I),
            "II" | "2" => Some(Group::II),
            "III" | "3" => Some(Group::III),
            _ => None,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Positions and dimensions of identical disk-shaped nanomagnets.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<Vec3>,
    groups: Vec<Group>,
    radius: f64,
    thickness: f64,
    gap: f64,
    input_index: usize,
}

impl ArrayGeometry {
    /// Builds an arbitrary layout. Overlap is not checked for non-grid arrays.
    pub fn new(
        positions: Vec<Vec3>,
        groups: Vec<Group>,
        radius: f64,
        thickness: f64,
        gap: f64,
        input_index: usize,
    ) -> Result<Self> {
        check_positive("radius", radius)?;
        check_positive("thickness", thickness)?;
        if !(gap >= 0.0) || !gap.is_finite() {
            return Err(Error::NonPositive {
                name: "gap",
                value: gap,
            });
        }
        if positions.is_empty() {
            return Err(Error::Empty("positions"));
        }
        if groups.len() != positions.len() {
            return Err(Error::DimensionMismatch {
                what: "groups",
                expected: positions.len(),
                found: groups.len(),
            });
        }
        if input_index >= positions.len() {
            return Err(Error::IndexOutOfRange {
                index: input_index,
                n_mag: positions.len(),
            });
        }
        Ok(Self {
            positions,
            groups,
            radius,
            thickness,
            gap,
            input_index,
        })
    }

    /// Rectangular grid in the x-y plane with pitch `2 * radius + gap` on
    /// both axes. Columns advance along x, rows along y, and the group of a
    /// magnet is set by its row (I, II, III repeating from row 0).
    pub fn grid(rows: usize, cols: usize, radius: f64, thickness: f64, gap: f64) -> Result<Self> {
        if rows == 0 {
            return Err(Error::NonPositive {
                name: "rows",
                value: 0.0,
            });
        }
        if cols == 0 {
            return Err(Error::NonPositive {
                name: "cols",
                value: 0.0,
            });
        }
        check_positive("radius", radius)?;
        check_positive("thickness", thickness)?;
        let pitch = 2.0 * radius + gap;
        let n = rows * cols;
        let mut positions = Vec::with_capacity(n);
        let mut groups = Vec::with_capacity(n);
        for i in 0..n {
            let (row, col) = (i / cols, i % cols);
            positions.push(Vec3::new(col as f64 * pitch, row as f64 * pitch, 0.0));
            groups.push(Group::of_row(row));
        }
        Self::new(positions, groups, radius, thickness, gap, 0)
    }

    pub fn n_mag(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> Group {
        self.groups[i]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn pitch(&self) -> f64 {
        2.0 * self.radius + self.gap
    }

    /// Volume of one disk, `π r² t`.
    pub fn volume(&self) -> f64 {
        PI * self.radius * self.radius * self.thickness
    }

    pub fn input_index(&self) -> usize {
        self.input_index
    }

    /// Vector from magnet `j` to magnet `i`.
    pub fn displacement(&self, j: usize, i: usize) -> Result<Vec3> {
        let n_mag = self.n_mag();
        for index in [i, j] {
            if index >= n_mag {
                return Err(Error::IndexOutOfRange { index, n_mag });
            }
        }
        if i == j {
            return Err(Error::SelfDisplacement(i));
        }
        Ok(self.positions[i] - self.positions[j])
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
