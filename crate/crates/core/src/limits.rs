/// Global resource bounds. Profiles avoid materializing huge integers, so
/// these mostly cap sieve sizes and the few places an exact integer is built.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Largest decimal-digit count of any integer we agree to materialize.
    pub max_digits: usize,
    /// Largest sieve endpoint for prime enumeration.
    pub sieve_bound: u64,
    /// Largest `l` for factorial/lcm/primorial/multinomial profiles.
    pub hseq_l_bound: u64,
    /// Largest norm threshold `l` for ideal-norm-product profiles.
    pub pik_l_bound: u64,
    /// Largest target value for complete brute-force representation search.
    pub brute_force_bound: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_digits: 100_000,
            sieve_bound: 100_000_000,
            hseq_l_bound: 1_000_000,
            pik_l_bound: 100_000,
            brute_force_bound: 1_000_000_000_000,
        }
    }
}
