use super::CoverError;
use crate::util::{TorusRect, TWO_PI};
use serde::{Deserialize, Serialize};

/// Rectangular subdomain `Q` of the torus with a collar width `delta`.
/// The collared domain is `Q~ = Q + B(0, delta)` and `h = diam(Q~)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subdomain {
    rect: TorusRect,
    collar: f64,
}

impl Subdomain {
    pub fn new(rect: TorusRect, collar: f64) -> Result<Self, CoverError> {
        if !(collar > 0.0 && collar < TWO_PI) {
            return Err(CoverError::BadCollar(collar));
        }
        Ok(Subdomain { rect, collar })
    }

    #[inline]
    pub fn rect(&self) -> &TorusRect {
        &self.rect
    }

    #[inline]
    pub fn collar(&self) -> f64 {
        self.collar
    }

    /// The collared rectangle `Q~` (sides clamp at the full period).
    pub fn collared(&self) -> TorusRect {
        self.rect.inflate(self.collar)
    }

    /// `h_q = diam(Q~)`.
    pub fn h(&self) -> f64 {
        self.collared().diameter()
    }

    /// Smaller side length of `Q` itself.
    pub fn min_side(&self) -> f64 {
        self.rect.wx.min(self.rect.wy)
    }
}
