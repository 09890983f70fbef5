use super::{squared_distance_to_nearest, BinaryMask};

/// Erosion by a disk: a set pixel survives iff every pixel on the grid
/// within Euclidean distance `radius` is set, i.e. its distance to the
/// nearest unset pixel exceeds `radius`. Pixels outside the grid do not
/// count as unset.
pub fn circular_erode(mask: &BinaryMask, radius: f64) -> BinaryMask {
    let radius = radius.max(0.0);
    let (w, h) = mask.dims();
    let Some(sq) = squared_distance_to_nearest(&mask.complement()) else {
        return mask.clone();
    };
    let r2 = radius * radius;
    let bits = sq.iter().zip(mask.bits()).map(|(&d2, &b)| b && d2 > r2).collect();
    BinaryMask::new(w, h, bits).expect("same dimensions")
}
