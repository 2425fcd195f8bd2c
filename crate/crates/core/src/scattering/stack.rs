use crate::error::{Error, Result};
use crate::optics::{self, Coefficients, Mode, Plate, SpectralPoint};

/// Plates ordered by strictly increasing position.
///
/// Plates are addressed with 1-based indices throughout the public API, and
/// gap `g` is the vacuum slab between plates `g` and `g + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    plates: Vec<Plate>,
}

impl Stack {
    pub fn new(plates: Vec<Plate>) -> Result<Self> {
        if plates.is_empty() {
            return Err(Error::InvalidStack("a stack needs at least one plate".into()));
        }
        for (i, pair) in plates.windows(2).enumerate() {
            let (a, b) = (pair[0].position(), pair[1].position());
            if !(b > a) {
                return Err(Error::InvalidStack(format!(
                    "plate positions must be strictly increasing: plate {} at {a}, plate {} at {b}",
                    i + 1,
                    i + 2
                )));
            }
        }
        Ok(Self { plates })
    }

    /// Identical plates at `start, start + gap, start + 2 gap, ...`.
    pub fn uniform(template: &Plate, count: usize, start: f64, gap: f64) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(Error::InvalidStack(format!("gap must be positive, got {gap}")));
        }
        let plates = (0..count)
            .map(|i| template.at(start + gap * i as f64))
            .collect::<Result<Vec<_>>>()?;
        Self::new(plates)
    }

    pub fn len(&self) -> usize {
        self.plates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plates.is_empty()
    }

    pub fn plates(&self) -> &[Plate] {
        &self.plates
    }

    /// Plate `i` (1-based).
    pub fn plate(&self, i: usize) -> Result<&Plate> {
        self.check_index(i)?;
        Ok(&self.plates[i - 1])
    }

    pub fn positions(&self) -> Vec<f64> {
        self.plates.iter().map(Plate::position).collect()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.len(),
            });
        }
        Ok(())
    }

    /// Width of gap `g`, i.e. `a_{g+1} - a_g`.
    pub fn gap(&self, g: usize) -> Result<f64> {
        if g == 0 || g >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: g,
                max: self.len().saturating_sub(1),
            });
        }
        Ok(self.plates[g].position() - self.plates[g - 1].position())
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.plates
            .windows(2)
            .map(|w| w[1].position() - w[0].position())
            .collect()
    }

    /// Smallest gap, or `None` for a single plate.
    pub fn min_gap(&self) -> Option<f64> {
        self.gaps().into_iter().reduce(f64::min)
    }

    /// Plates `first..=last` (1-based, inclusive) as a stack of their own.
    pub fn sub(&self, first: usize, last: usize) -> Result<Stack> {
        self.check_index(first)?;
        self.check_index(last)?;
        if first > last {
            return Err(Error::InvalidStack(format!(
                "empty plate range {first}..={last}"
            )));
        }
        Ok(Stack {
            plates: self.plates[first - 1..last].to_vec(),
        })
    }

    /// Copy with every coupling pair exchanged (`λe ↔ λg`).
    pub fn swapped(&self) -> Stack {
        Stack {
            plates: self.plates.iter().map(Plate::swapped).collect(),
        }
    }

    /// Copy with every position multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Stack> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidStack(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let plates = self
            .plates
            .iter()
            .map(|p| p.at(p.position() * factor))
            .collect::<Result<Vec<_>>>()?;
        Stack::new(plates)
    }

    /// Copy with plate `i` displaced by `dz`; fails if the ordering would break.
    pub fn with_plate_shifted(&self, i: usize, dz: f64) -> Result<Stack> {
        self.check_index(i)?;
        let mut plates = self.plates.clone();
        plates[i - 1] = plates[i - 1].at(plates[i - 1].position() + dz)?;
        Stack::new(plates)
    }

    /// Copy with gap `g` set to `width`, shifting plates `g+1..=N` rigidly.
    pub fn with_gap(&self, g: usize, width: f64) -> Result<Stack> {
        let current = self.gap(g)?;
        if !(width > 0.0) {
            return Err(Error::InvalidStack(format!(
                "gap width must be positive, got {width}"
            )));
        }
        let shift = width - current;
        let plates = self
            .plates
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                if idx >= g {
                    p.at(p.position() + shift)
                } else {
                    Ok(p.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Stack::new(plates)
    }

    pub fn is_kappa_only(&self) -> bool {
        self.plates.iter().all(Plate::is_kappa_only)
    }

    /// Per-plate coefficients for `mode` at `sp`, in plate order.
    pub fn coefficients(&self, mode: Mode, sp: &SpectralPoint) -> Result<Vec<Coefficients>> {
        self.plates
            .iter()
            .map(|p| optics::coefficients(p, mode, sp))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(z: f64) -> Plate {
        Plate::perfect_e(z).unwrap()
    }

    #[test]
    fn rejects_unsorted_and_duplicate_positions() {
        assert!(Stack::new(vec![pe(1.0), pe(0.0)]).is_err());
        assert!(Stack::new(vec![pe(0.0), pe(0.0)]).is_err());
        assert!(Stack::new(vec![]).is_err());
    }

    #[test]
    fn gaps_and_sub_stacks() {
        let s = Stack::new(vec![pe(0.0), pe(1.0), pe(3.5)]).unwrap();
        assert_eq!(s.gaps(), vec![1.0, 2.5]);
        assert_eq!(s.gap(2).unwrap(), 2.5);
        assert!(s.gap(3).is_err());
        assert_eq!(s.min_gap(), Some(1.0));
        assert_eq!(s.sub(2, 3).unwrap().positions(), vec![1.0, 3.5]);
        assert!(s.sub(3, 2).is_err());
        assert!(s.plate(0).is_err());
    }

    #[test]
    fn gap_resize_moves_trailing_plates() {
        let s = Stack::new(vec![pe(0.0), pe(1.0), pe(2.0)]).unwrap();
        let t = s.with_gap(1, 0.5).unwrap();
        assert_eq!(t.positions(), vec![0.0, 0.5, 1.5]);
        assert!(s.with_plate_shifted(2, 1.5).is_err());
    }
}
