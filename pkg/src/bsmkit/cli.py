"""Command-line interface.

Exit codes: 0 success / all checks passed, 1 a verification check failed,
2 usage, parameter or file-format error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import adversary as adv
from . import analysis, bits, keyfile, randomness, suites
from .errors import BSMError, LengthMismatch, ParameterError, UnknownSelector
from .protocol import Ciphertext, Message, Params, decrypt, encrypt, expand_key

log = logging.getLogger("bsmkit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _params(args, m=None) -> Params:
    return Params(args.n, args.k, m if m is not None else (args.m or args.n), Fraction(args.gamma))


def _seed(args) -> bytes | None:
    return None if args.seed is None else randomness.seed_from_text(args.seed)


def _emit(obj, args):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if getattr(args, "json_out", None):
        Path(args.json_out).write_text(text + "\n")
    print(text)


# --------------------------------------------------------------------------


def cmd_keygen(args) -> int:
    if args.k < 1 or args.n < 1:
        raise ParameterError("n and k must be positive")
    key = keyfile.generate_key(args.n, args.k, _seed(args))
    keyfile.save_key(key, args.out)
    log.info("wrote key over Z_%d^%d to %s", args.n, args.k, args.out)
    return EXIT_OK


def cmd_gen_randomness(args) -> int:
    p = Params(args.n, args.k, 1, Fraction(args.gamma))
    if args.crypto or args.seed is None:
        seed = _seed(args) or randomness.StreamConfig.fresh().seed
        kind = randomness.GeneratorKind.CRYPTOGRAPHIC
    else:
        seed = _seed(args)
        kind = randomness.GeneratorKind.DETERMINISTIC_TEST
    alpha = randomness.generate(randomness.StreamConfig(seed, args.block_size, kind), p)
    randomness.save(alpha, args.out)
    log.info("wrote %d-bit random string to %s", p.nk, args.out)
    return EXIT_OK


def _xor_file(args, wrap_in, wrap_out) -> int:
    key = keyfile.load_key(args.key)
    alpha = randomness.load(args.alpha)
    if (alpha.n, alpha.k) != (key.n, key.k):
        raise LengthMismatch(f"key is over Z_{key.n}^{key.k} but the string is {alpha.k} x {alpha.n}")
    data = Path(args.input).read_bytes()
    nbits = args.bits if args.bits is not None else 8 * len(data)
    if nbits < 1:
        raise LengthMismatch("empty message")
    if nbits > alpha.n:
        raise LengthMismatch(f"message has {nbits} bits but at most n = {alpha.n} can be protected")
    if alpha.ones_count() == 0:
        print("warning: degenerate random string (all zero); the pad is all zero", file=sys.stderr)
    p = Params(alpha.n, alpha.k, nbits)
    cfg = randomness.StreamConfig(b"\0" * 32, args.block_size)
    x = expand_key(randomness.broadcast(alpha, cfg), key, p)
    out = wrap_out(wrap_in(bits.unpack(data, nbits)), x)
    Path(args.out).write_bytes(bits.pack(out.bits))
    return EXIT_OK


def cmd_encrypt(args) -> int:
    return _xor_file(args, Message, encrypt)


def cmd_decrypt(args) -> int:
    return _xor_file(args, Ciphertext, decrypt)


RECORDERS = {
    "zero": lambda p, budget: adv.ZeroRecorder(),
    "prefix": lambda p, budget: adv.PrefixRecorder(budget),
    "parity": lambda p, budget: adv.ParitySketchRecorder(budget, p.n, p.k),
    "identity": lambda p, budget: adv.IdentityRecorder(p.n, p.k),
}


def _decoder(name, rec, p, args):
    if name == "random":
        return adv.HashDecoder(args.seed)
    if name == "constant":
        return adv.ConstantDecoder(0)
    if name == "bayes":
        return adv.bayes_optimal_decoder(rec, p, unsafe_test_override_budget=args.unsafe_test_override_budget)
    if name == "full":
        return adv.FullInformationDecoder(p)
    raise UnknownSelector(name)


def _distinguisher(name, p, m1, args):
    if name == "constant":
        return adv.ConstantDistinguisher(0)
    if name == "random":
        return adv.HashDistinguisher(args.seed)
    if name == "full":
        return adv.FullInformationDistinguisher(p, Message(m1))
    raise UnknownSelector(name)


def cmd_attack_sim(args) -> int:
    m = args.m
    if args.game == "semantic" and m is None:
        m = len(bits.parse_bitstring(args.m0))
    p = _params(args, m)
    budget = p.beta if args.unsafe_test_override_budget is None else args.unsafe_test_override_budget
    if args.recorder not in RECORDERS:
        raise UnknownSelector(args.recorder)
    rec = RECORDERS[args.recorder](p, budget)
    common = dict(unsafe_test_override_budget=args.unsafe_test_override_budget, workers=args.workers)
    feasible = True
    try:
        adv._check_enumerable(p, min(args.enum_limit, adv.DEFAULT_ENUM_LIMIT))
    except BSMError:
        feasible = False
    if args.game == "bit":
        dec = _decoder(args.decoder, rec, p, args)
        result = adv.bit_security_game(rec, dec, p, args.i, args.trials, args.seed, with_exact=feasible, **common)
    else:
        m0, m1 = bits.parse_bitstring(args.m0), bits.parse_bitstring(args.m1)
        dist = _distinguisher(args.distinguisher, p, m1, args)
        result = adv.semantic_security_game(rec, dist, m0, m1, p, args.trials, args.seed, with_exact=feasible, **common)
    _emit(result.to_dict(), args)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = suites.run(args.suite, n=args.n, k=args.k, m=args.m, max_nk=args.enum_limit, seed=args.seed_int)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.suite}: {c.name}  {c.detail}", file=sys.stderr)
    ok = all(c.passed for c in checks)
    _emit({"suite": args.suite, "passed": ok, "checks": [c.to_dict() for c in checks]}, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bounds(args) -> int:
    p = _params(args)
    _emit(analysis.security_bounds(p).to_json(), args)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bsmkit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, need_nk=True):
        sp.add_argument("--n", type=int, required=need_nk)
        sp.add_argument("--k", type=int, required=need_nk)
        sp.add_argument("--m", type=int)
        sp.add_argument("--gamma", default="45/100")
        sp.add_argument("--json-out")

    sp = sub.add_parser("keygen", help="generate a secret key file")
    common(sp)
    sp.add_argument("--seed")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_keygen)

    sp = sub.add_parser("gen-randomness", help="generate and save a public random string")
    common(sp)
    sp.add_argument("--seed")
    sp.add_argument("--crypto", action="store_true", help="cryptographic generator instead of the test one")
    sp.add_argument("--block-size", type=int, default=4096)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen_randomness)

    for name, fn in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        sp = sub.add_parser(name, help=f"{name} a file with key + random string")
        sp.add_argument("--key", required=True)
        sp.add_argument("--alpha", required=True)
        sp.add_argument("--in", dest="input", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--bits", type=int, help="message length in bits (default 8 x bytes)")
        sp.add_argument("--block-size", type=int, default=4096)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("attack-sim", help="run the bit-security or semantic-security game")
    common(sp)
    sp.add_argument("--game", choices=["bit", "semantic"], default="bit")
    sp.add_argument("--recorder", default="zero", help=f"one of {sorted(RECORDERS)}")
    sp.add_argument("--decoder", default="random", help="random | constant | bayes | full")
    sp.add_argument("--distinguisher", default="random", help="constant | random | full")
    sp.add_argument("--m0")
    sp.add_argument("--m1")
    sp.add_argument("--i", type=int, default=1)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", default="0")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--enum-limit", type=int, default=adv.DEFAULT_ENUM_LIMIT)
    sp.add_argument("--unsafe-test-override-budget", type=int, default=None,
                    help="replace the storage budget (testing only; voids the security model)")
    sp.set_defaults(func=cmd_attack_sim)

    sp = sub.add_parser("verify", help="run exact verification suites")
    common(sp, need_nk=False)
    sp.add_argument("--suite", default="all", choices=["all", *suites.SUITES])
    sp.add_argument("--enum-limit", type=int, default=None, help="largest n*k enumerated exhaustively")
    sp.add_argument("--seed", dest="seed_int", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bounds", help="evaluate the closed-form security bounds")
    common(sp)
    sp.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "game", None) == "semantic" and (args.m0 is None or args.m1 is None):
        parser.error("--game semantic needs --m0 and --m1")
    try:
        return args.func(args)
    except (BSMError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
