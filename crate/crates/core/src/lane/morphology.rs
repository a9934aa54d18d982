//! Per-label binary erosion used to thin the lane raster.

use super::mask::SegMask;
use crate::{Error, Result};

/// Erode each label independently with a k x k structuring element.
///
/// A pixel keeps its label iff every pixel of its k x k neighborhood carries
/// the same label; pixels outside the frame never match, so labels also erode
/// at the image border.
pub fn erode(mask: &SegMask, kernel: usize) -> Result<SegMask> {
    if kernel < 3 || kernel.is_multiple_of(2) {
        return Err(Error::BadKernel(kernel));
    }
    let r = (kernel / 2) as isize;
    let (w, h) = (mask.width as isize, mask.height as isize);
    let mut out = SegMask::new(mask.width, mask.height);

    for y in 0..h {
        for x in 0..w {
            let label = mask.get(x as usize, y as usize);
            if label == 0 {
                continue;
            }
            let mut keep = true;
            'window: for dy in -r..=r {
                let ny = y + dy;
                if ny < 0 || ny >= h {
                    keep = false;
                    break;
                }
                for dx in -r..=r {
                    let nx = x + dx;
                    if nx < 0 || nx >= w || mask.get(nx as usize, ny as usize) != label {
                        keep = false;
                        break 'window;
                    }
                }
            }
            if keep {
                out.set(x as usize, y as usize, label);
            }
        }
    }
    Ok(out)
}
