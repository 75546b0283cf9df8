use crate::error::{Error, Result};

/// Raster of drivable cells, row-major, `true` = on track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    width: u32,
    height: u32,
    drivable: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(width: u32, height: u32, drivable: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if drivable.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "mask has {} cells, expected {width}x{height} = {expected}",
                drivable.len()
            )));
        }
        if !drivable.iter().any(|&d| d) {
            return Err(Error::InvalidGrid("no drivable cell".into()));
        }
        Ok(Self {
            width,
            height,
            drivable,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cells(&self) -> &[bool] {
        &self.drivable
    }

    /// Cell lookup; anything outside the grid is a wall.
    #[inline]
    pub fn is_drivable(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.drivable[y as usize * self.width as usize + x as usize]
    }

    /// Lookup of the cell containing the real-valued point `(x, y)`.
    #[inline]
    pub fn is_drivable_at(&self, x: f64, y: f64) -> bool {
        if !(x.is_finite() && y.is_finite()) {
            return false;
        }
        self.is_drivable(x.floor() as i64, y.floor() as i64)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64
    }

    pub fn drivable_count(&self) -> usize {
        self.drivable.iter().filter(|&&d| d).count()
    }
}
