/// True for pictographic emoji codepoints.
///
/// Skin-tone modifiers, variation selectors, zero-width joiners and regional
/// indicators are not emoji on their own; normalization strips them.
pub fn is_emoji(c: char) -> bool {
    matches!(
        c as u32,
        0x1F300..=0x1F3FA
            | 0x1F400..=0x1F64F
            | 0x1F680..=0x1F6FF
            | 0x1F7E0..=0x1F7EB
            | 0x1F90C..=0x1F9FF
            | 0x1FA70..=0x1FAFF
            | 0x2600..=0x27BF
            | 0x2B50
            | 0x2B55
            | 0x2B06
            | 0x2B07
            | 0x2B05
            | 0x2934
            | 0x2935
            | 0x3030
            | 0x303D
            | 0x3297
            | 0x3299
    )
}
