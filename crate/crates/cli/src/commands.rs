use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context};
use bitqpke::attacks::{
    guessing_attack_estimate, multi_copy_distances, multi_copy_mixture, newscheme_attack_rate, py12_attack,
    py12_attack_rate, recover_boolean_function,
};
use bitqpke::py12::{py12_decrypt, py12_encrypt, py12_issue, Py12Key};
use bitqpke::qsim::TwoBranchState;
use bitqpke::verify::{
    check_maximally_mixed, convergence_study, ensemble_keys, ensemble_mixture, perfect_encryption_transform,
    proposition1_distance, proposition2_distance, random_density_matrix, render_reports,
    sampled_proposition1_distance, sampled_proposition2_distance, ClaimReport, KeyDomain,
};
use bitqpke::{
    decrypt, decrypt_dense, encrypt, issue_public_key, trial_rng, BitVec, BooleanFunction, Ciphertext, DirRegistry,
    KeyId, PrivateKey, Registry,
};

use crate::{parse_pattern, read, write, Attack, Claim, Cli, Command, Domain, Outcome, Py12Command, VerifyOpts};

const PRIVATE_KEY_FILE: &str = "private.key";

fn resolve_seed(seed: Option<u64>, out: &mut String) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    let _ = writeln!(out, "seed={seed}");
    seed
}

pub fn run(cli: Cli, out: &mut String) -> anyhow::Result<Outcome> {
    let seed = cli.seed;
    match cli.command {
        Command::Keygen { n, m, p, out: dir } => {
            let seed = resolve_seed(seed, out);
            let sk = PrivateKey::generate(n, m, p, &mut trial_rng(seed, 0))?;
            let path = dir.join(PRIVATE_KEY_FILE);
            write(&path, &sk.to_string())?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Issue { key, registry, count } => {
            let sk: PrivateKey = read(&key.join(PRIVATE_KEY_FILE))?.parse()?;
            let reg = DirRegistry::open(&registry)?;
            let seed = resolve_seed(seed, out);
            let mut rng = trial_rng(seed, 0);
            for _ in 0..count {
                let pk = issue_public_key(&sk, &mut rng)?;
                reg.register(&pk)?;
                writeln!(out, "key_id={}", pk.key_id)?;
            }
        }
        Command::Encrypt { registry, key_id, bit, out: path } => {
            let reg = DirRegistry::open(&registry)?;
            let pk = reg.fetch(&KeyId::new(key_id)?)?;
            let ct = encrypt(&pk, bit, &reg)?;
            write(&path, &ct.to_string())?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Decrypt { key, ct, dense } => {
            let sk: PrivateKey = read(&key.join(PRIVATE_KEY_FILE))?.parse()?;
            let ct: Ciphertext = read(&ct)?.parse()?;
            let bit = decrypt(&sk, &ct)?;
            writeln!(out, "{}", bit as u8)?;
            if dense {
                let (b, prob) = decrypt_dense(&sk, &ct.state.expand()?, &ct.tag)?;
                writeln!(out, "dense bit={} probability={prob:.12}", b as u8)?;
            }
        }
        Command::Verify { claim, opts } => return verify(claim, &opts, seed, out),
        Command::Attack { attack } => return run_attack(attack, seed, out),
        Command::Multicopy { n, t, pattern } => {
            let pattern = parse_pattern(&pattern)?;
            if pattern.len() != t {
                bail!("pattern has {} bits but t = {t}", pattern.len());
            }
            let rho = multi_copy_mixture(n, &pattern)?;
            rho.validate().context("mixture is not a valid density matrix")?;
            let min_eig = rho.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
            writeln!(out, "n={n} t={t} dim={}", rho.dim())?;
            writeln!(out, "trace={:.12} hermiticity={:.3e} min_eigenvalue={min_eig:.3e}", rho.trace().re, rho.hermiticity_error())?;
            for (other, d) in multi_copy_distances(n, &pattern)? {
                let bits: String = other.iter().map(|&b| if b { '1' } else { '0' }).collect();
                writeln!(out, "pattern={bits} D={d:.15}")?;
            }
        }
        Command::Bench { n, repeats } => {
            let terms = ensemble_keys(n, KeyDomain::Omega).len();
            let mut best = f64::INFINITY;
            for _ in 0..repeats.max(1) {
                let start = Instant::now();
                let rho = ensemble_mixture(n, false, KeyDomain::Omega)?;
                std::hint::black_box(&rho);
                best = best.min(start.elapsed().as_secs_f64());
            }
            writeln!(out, "n={n} terms={terms} best_seconds={best:.6} terms_per_second={:.0}", terms as f64 / best)?;
        }
        Command::Py12 { command } => py12(command, seed, out)?,
    }
    Ok(Outcome::Success)
}

fn domain(d: Domain) -> KeyDomain {
    match d {
        Domain::Odd => KeyDomain::Omega,
        Domain::Nonzero => KeyDomain::Nonzero,
        Domain::All => KeyDomain::All,
    }
}

fn verify(claim: Claim, opts: &VerifyOpts, seed: Option<u64>, out: &mut String) -> anyhow::Result<Outcome> {
    let n = opts.n;
    let mut reports = Vec::new();
    match claim {
        Claim::PerfectEncryption => {
            let seed = resolve_seed(seed, out);
            let mut rng = trial_rng(seed, 0);
            let (mut pure, mut mixed) = (0.0f64, 0.0f64);
            for s in 0..opts.states {
                let terms = if s % 2 == 0 { 1 } else { 4 };
                let rho = random_density_matrix(n, terms, &mut rng)?;
                let (_, dev) = check_maximally_mixed(&perfect_encryption_transform(&rho)?, opts.tol)?;
                if terms == 1 {
                    pure = pure.max(dev);
                } else {
                    mixed = mixed.max(dev);
                }
            }
            reports.push(ClaimReport::at_most(format!("perfect-encryption-pure-n{n}"), pure, opts.tol));
            reports.push(ClaimReport::at_most(format!("perfect-encryption-mixed-n{n}"), mixed, opts.tol));
        }
        Claim::Mixture => {
            let d = domain(opts.domain);
            for bit in [false, true] {
                let (_, dev) = check_maximally_mixed(&ensemble_mixture(n, bit, d)?, opts.tol)?;
                reports.push(ClaimReport::at_most(format!("mixture-bit{}-{d}-n{n}", bit as u8), dev, opts.tol));
            }
        }
        Claim::Prop1 => {
            let d = proposition1_distance(n)?;
            writeln!(out, "D={d:.6}")?;
            reports.push(ClaimReport::at_most(format!("prop1-n{n}"), d, opts.tol));
            if !opts.sampled.is_empty() {
                let seed = resolve_seed(seed, out);
                sampled(out, &opts.sampled, opts.reps, seed, |c, s| sampled_proposition1_distance(n, c, s))?;
            }
        }
        Claim::Prop2 => {
            for bit in [false, true] {
                let d = proposition2_distance(n, bit)?;
                writeln!(out, "bit={} D={d:.6}", bit as u8)?;
                reports.push(ClaimReport::at_most(format!("prop2-bit{}-n{n}", bit as u8), d, opts.tol));
            }
            if !opts.sampled.is_empty() {
                let seed = resolve_seed(seed, out);
                sampled(out, &opts.sampled, opts.reps, seed, |c, s| sampled_proposition2_distance(n, false, c, s))?;
            }
        }
    }
    out.push_str(&render_reports(&reports));
    Ok(if reports.iter().all(|r| r.pass) { Outcome::Success } else { Outcome::Failure })
}

fn sampled<F>(out: &mut String, sizes: &[usize], reps: usize, seed: u64, f: F) -> anyhow::Result<()>
where
    F: Fn(usize, u64) -> bitqpke::Result<f64> + Sync,
{
    let points = convergence_study(sizes, reps, seed, f)?;
    for p in &points {
        writeln!(out, "sampled keys={} mean_D={:.6}", p.samples, p.mean_distance)?;
    }
    let monotone = points.windows(2).all(|w| w[1].mean_distance <= w[0].mean_distance);
    writeln!(out, "sampled monotone_decreasing={monotone}")?;
    Ok(())
}

fn run_attack(attack: Attack, seed: Option<u64>, out: &mut String) -> anyhow::Result<Outcome> {
    let seed = resolve_seed(seed, out);
    match attack {
        Attack::Py12 { n, max_samples, trials } => match trials {
            None => {
                let tr = py12_attack(n, max_samples, &mut trial_rng(seed, 0))?;
                write!(out, "{tr}")?;
                writeln!(out, "all samples orthogonal={}", tr.samples_orthogonal())?;
            }
            Some(trials) => {
                let r = py12_attack_rate(n, max_samples, trials, seed)?;
                writeln!(out, "n={n} trials={trials} max_samples={max_samples}")?;
                writeln!(out, "successes={} rate={:.4} orthogonal_trials={}", r.successes, r.rate(), r.orthogonal)?;
            }
        },
        Attack::Newscheme { n, trials, max_samples } => {
            let r = newscheme_attack_rate(n, max_samples, trials, seed)?;
            writeln!(out, "n={n} trials={trials} max_samples={max_samples}")?;
            writeln!(out, "successes={} rate={:.4} orthogonal_trials={}", r.successes, r.rate(), r.orthogonal)?;
        }
        Attack::RecoverF { m, p, n } => {
            let f = BooleanFunction::sample(m, n, p, &mut trial_rng(seed, 0))?;
            let pairs = (0..1usize << m)
                .map(|x| {
                    let s = BitVec::from_index(x, m);
                    f.eval(&s).map(|k| (s, k))
                })
                .collect::<bitqpke::Result<Vec<_>>>()?;
            let g = recover_boolean_function(&pairs, m, n)?;
            let mismatches = pairs
                .iter()
                .map(|(s, k)| g.eval(s).map(|r| &r != k))
                .collect::<bitqpke::Result<Vec<_>>>()?
                .into_iter()
                .filter(|&bad| bad)
                .count();
            writeln!(out, "m={m} n={n} p={p} pairs={}", pairs.len())?;
            for j in 0..n {
                let terms: Vec<String> = (0..1usize << m)
                    .filter(|&a| g.coefficients(j).get(a))
                    .map(|a| BitVec::from_index(a, m).to_string())
                    .collect();
                writeln!(out, "output {j}: {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") })?;
            }
            writeln!(out, "underdetermined={} mismatches={mismatches}", g.is_underdetermined())?;
        }
        Attack::Guess { n, l, trials } => {
            let r = guessing_attack_estimate(n, l, trials, seed)?;
            write!(out, "{r}")?;
            let verdict = match (r.matches_closed_form(0.02), r.matches_prose(0.02)) {
                (true, false) => "closed-form",
                (false, true) => "prose",
                (true, true) => "both",
                (false, false) => "neither",
            };
            writeln!(out, "reproduces={verdict}")?;
        }
    }
    Ok(Outcome::Success)
}

fn py12(command: Py12Command, seed: Option<u64>, out: &mut String) -> anyhow::Result<()> {
    match command {
        Py12Command::Keygen { n, m, p, out: dir } => {
            let seed = resolve_seed(seed, out);
            let key = Py12Key::generate(n, m, p, &mut trial_rng(seed, 0))?;
            write(&dir.join("py12.key"), &key.to_string())?;
            write(&dir.join("py12.pub"), &format!("{}\n", py12_issue(&key)?))?;
            writeln!(out, "wrote {}", dir.join("py12.key").display())?;
            writeln!(out, "wrote {}", dir.join("py12.pub").display())?;
        }
        Py12Command::Encrypt { public, bit, out: path } => {
            let state: TwoBranchState = read(&public)?.trim().parse()?;
            write(&path, &format!("{}\n", py12_encrypt(&state, bit)?))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Py12Command::Decrypt { key, ct } => {
            let key: Py12Key = read(&key)?.parse()?;
            let state: TwoBranchState = read(&ct)?.trim().parse()?;
            writeln!(out, "{}", py12_decrypt(&key, &state)? as u8)?;
        }
    }
    Ok(())
}
