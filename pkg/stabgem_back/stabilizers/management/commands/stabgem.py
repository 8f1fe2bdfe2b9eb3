"""
`manage.py stabgem`: batch front door for codes, analyses and certificates.

    stabgem code build|info|check
    stabgem analyze distance|correctable|mesh|braiding|exchange
    stabgem gem e0|ascend|certify|theorem2|sequential|mixed-bound
    stabgem oracle crosscheck
    stabgem report list|show

Every result is rendered through `stabilizers.reports`; the parameters of
the run are echoed under `provenance.params`. Domain errors become
CommandError with the error's exit code (2 for invalid input, 3 for
certificate failures).
"""

from __future__ import annotations

import argparse
import logging
import math
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from stabilizers import oracle, reports
from stabilizers.circuits import load_circuit, random_circuit, relabeling_circuit
from stabilizers.codes import (
    StabilizerCode,
    build_code,
    load_code,
    product_state,
    save_code,
    symmetric_mixed_state,
    zero_state,
)
from stabilizers.crosscheck import check_against_oracle, crosscheck
from stabilizers.entanglement import (
    e0_alternating_ascent,
    best_pauli_product,
    et_upper_via_circuit_ascent,
    mixed_gem_syndrome_bound,
    patch_certificate_toric,
    sequential_projection_bound,
    syndrome_distribution,
    theorem2_certificate,
)
from stabilizers.exceptions import AlgebraError, InputError, StabGemError
from stabilizers.filters import CertificateRunFilter
from stabilizers.geometry import Region, partition_into_patches
from stabilizers.logicals import (
    code_word,
    default_mesh_specs,
    distance_bruteforce,
    is_correctable,
    logical_in_region,
    mesh_logicals,
)
from stabilizers.models import CertificateRun
from stabilizers.serializers import (
    BraidingTripleSerializer,
    CertificateRunSerializer,
    ExchangeTripleSerializer,
    MeshLogicalReportSerializer,
)
from stabilizers.statistics import braiding_phase, exchange_phase
from stabilizers.strings import build_braiding_triple, canonical_t_junction

logger = logging.getLogger(__name__)

# Options that describe the run rather than its result; they are left out of
# the params echo so reports do not depend on where they were written.
_UNECHOED = {
    "verbosity",
    "settings",
    "pythonpath",
    "traceback",
    "no_color",
    "force_color",
    "skip_checks",
    "stdout",
    "stderr",
    "output",
    "format",
    "record",
    "jobs",
}


def _int_list(value: str) -> list[int]:
    try:
        return sorted({int(v) for v in value.split(",") if v.strip()})
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated qubit ids, got {value!r}") from exc


def _code_arguments(parser) -> None:
    parser.add_argument(
        "--code",
        choices=["toric", "honeycomb", "ghz"],
        default="toric",
        help="Built-in code family (default: toric)",
    )
    parser.add_argument("--L", type=int, default=None, help="Toric linear size")
    parser.add_argument("--Lx", type=int, default=None, help="Honeycomb width")
    parser.add_argument("--Ly", type=int, default=None, help="Honeycomb height")
    parser.add_argument("--n", type=int, default=None, help="GHZ qubit count")
    parser.add_argument("--file", default=None, help="JSON code file instead of a built-in family")
    parser.add_argument(
        "--distance",
        type=int,
        default=None,
        help="Declare the code distance for codes loaded from files",
    )


def _run_arguments(parser, depth: bool = False) -> None:
    if depth:
        parser.add_argument("--t", type=int, default=0, help="Circuit depth (default: 0)")
    parser.add_argument("--seed", type=int, default=None, help="Seed for every random choice")
    parser.add_argument("--jobs", type=int, default=None, help="Worker count (default: STABGEM_JOBS or cores)")
    parser.add_argument(
        "--format", choices=reports.FORMATS, default="json", help="Report format (default: json)"
    )
    parser.add_argument("--output", default=None, help="Write the report to this path")
    parser.add_argument(
        "--oracle-check",
        action="store_true",
        help="Cross-check stabilizer quantities against the dense oracle (small n only)",
    )


class Command(BaseCommand):
    help = "Build stabilizer codes, analyze their logicals and certify entanglement lower bounds."

    def add_arguments(self, parser):
        groups = parser.add_subparsers(dest="group", required=True, metavar="group")

        code = groups.add_parser("code", help="Build, describe or validate codes")
        code_actions = code.add_subparsers(dest="action", required=True, metavar="action")
        build = code_actions.add_parser("build", help="Build a family and write it as a code file")
        _code_arguments(build)
        _run_arguments(build)
        build.add_argument("--save", default=None, help="Path for the code file")
        info = code_actions.add_parser("info", help="Parameters n, k, d, w")
        _code_arguments(info)
        _run_arguments(info)
        check = code_actions.add_parser("check", help="Validate a code file")
        _code_arguments(check)
        _run_arguments(check)

        analyze = groups.add_parser("analyze", help="Logical-operator and string analyses")
        analyze_actions = analyze.add_subparsers(dest="action", required=True, metavar="action")
        distance = analyze_actions.add_parser("distance", help="Minimum logical weight")
        _code_arguments(distance)
        _run_arguments(distance)
        distance.add_argument("--max-weight", type=int, default=None)
        correctable = analyze_actions.add_parser("correctable", help="Is a region correctable")
        _code_arguments(correctable)
        _run_arguments(correctable)
        correctable.add_argument("--region", type=_int_list, required=True, help="Qubit ids, e.g. 0,1,5")
        for name, text in (
            ("mesh", "Clean a logical pair onto two meshes and locate Q"),
            ("braiding", "Synthesize and verify a braiding triple at Q"),
        ):
            sub = analyze_actions.add_parser(name, help=text)
            _code_arguments(sub)
            _run_arguments(sub, depth=True)
        exchange = analyze_actions.add_parser("exchange", help="Exchange phase of a T-junction")
        _code_arguments(exchange)
        _run_arguments(exchange)
        exchange.add_argument("--junction", type=int, default=0)
        exchange.add_argument("--arm-length", type=int, default=1)

        gem = groups.add_parser("gem", help="Geometric entanglement and its certificates")
        gem_actions = gem.add_subparsers(dest="action", required=True, metavar="action")
        e0 = gem_actions.add_parser("e0", help="Exhaustive E0 over Pauli-eigenstate products")
        _code_arguments(e0)
        _run_arguments(e0)
        ascend = gem_actions.add_parser("ascend", help="Dense see-saw or circuit ascent")
        _code_arguments(ascend)
        _run_arguments(ascend)
        ascend.add_argument("--t", type=int, default=None, help="Circuit depth; omit for product states")
        ascend.add_argument("--restarts", type=int, default=8)
        ascend.add_argument("--iters", type=int, default=200)
        certify = gem_actions.add_parser("certify", help="Patch certificate")
        _code_arguments(certify)
        _run_arguments(certify, depth=True)
        certify.add_argument("--circuit", default=None, help="JSON circuit file to dress the code with")
        certify.add_argument(
            "--relabel", action="store_true", help="Dress with a seeded single-qubit Clifford layer"
        )
        certify.add_argument(
            "--circuit-depth", type=int, default=None, help="Dress with a seeded random circuit of this depth"
        )
        certify.add_argument("--locality-radius", type=float, default=None)
        certify.add_argument("--record", action="store_true", help="Append the run to the ledger")
        theorem2 = gem_actions.add_parser("theorem2", help="Mesh intersection certificate")
        _code_arguments(theorem2)
        _run_arguments(theorem2, depth=True)
        theorem2.add_argument("--record", action="store_true")
        sequential = gem_actions.add_parser("sequential", help="Sequential projection bound")
        _code_arguments(sequential)
        _run_arguments(sequential, depth=True)
        sequential.add_argument("--patch-size", type=float, default=None)
        sequential.add_argument("--gap", type=float, default=None)
        sequential.add_argument("--record", action="store_true")
        mixed = gem_actions.add_parser("mixed-bound", help="Syndrome bound for the symmetric mixed state")
        _code_arguments(mixed)
        _run_arguments(mixed)
        mixed.add_argument(
            "--sigma",
            default="zero",
            help="'zero' or comma-separated eigenstates such as +Z,-X,+Y",
        )
        mixed.add_argument("--record", action="store_true")

        oracle_group = groups.add_parser("oracle", help="Dense oracle cross-checks")
        oracle_actions = oracle_group.add_subparsers(dest="action", required=True, metavar="action")
        cross = oracle_actions.add_parser("crosscheck", help="Random stabilizer vs dense comparisons")
        _run_arguments(cross)
        cross.add_argument("--samples", type=int, default=500)
        cross.add_argument("--n-max", type=int, default=10)
        cross.add_argument("--depth", type=int, default=3)

        report = groups.add_parser("report", help="Certificate ledger")
        report_actions = report.add_subparsers(dest="action", required=True, metavar="action")
        listing = report_actions.add_parser("list", help="List recorded runs")
        listing.add_argument("--kind", default=None)
        listing.add_argument("--family", default=None)
        listing.add_argument("--family-in", dest="family__in", default=None)
        listing.add_argument("--t", type=int, default=None)
        listing.add_argument("--min-bound", type=float, default=None)
        listing.add_argument("--passed", choices=["true", "false"], default=None)
        listing.add_argument("--output", default=None)
        show = report_actions.add_parser("show", help="Print a recorded report")
        show.add_argument("id", type=int)
        show.add_argument("--output", default=None)
        show.add_argument(
            "--export", action="store_true", help="Also write the report under STABGEM_REPORT_DIR"
        )

    def handle(self, *args: Any, **options: Any):
        handler = getattr(self, f"_{options['group']}_{options['action'].replace('-', '_')}")
        try:
            handler(options)
        except StabGemError as exc:
            logger.debug("stabgem %s %s failed", options["group"], options["action"], exc_info=True)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _code(self, options: dict) -> StabilizerCode:
        if options.get("file"):
            code = load_code(options["file"])
        else:
            code = build_code(options["code"], L=options.get("L"), Lx=options.get("Lx"), Ly=options.get("Ly"), n=options.get("n"))
        if options.get("distance") is not None:
            code.declare_distance(options["distance"], "declared")
        return code

    def _params(self, options: dict) -> dict:
        return {k: v for k, v in sorted(options.items()) if k not in _UNECHOED and v is not None}

    def _emit(self, options: dict, payload: dict) -> str:
        payload = dict(payload)
        provenance = dict(payload.get("provenance") or {})
        provenance.setdefault("params", self._params(options))
        payload["provenance"] = provenance
        data, digest = reports.write_report(payload, options.get("format") or "json", options.get("output"))
        self.stdout.write(data.decode("utf-8"), ending="")
        return digest

    def _record(self, options: dict, kind: str, payload: dict, code: StabilizerCode) -> None:
        if not options.get("record"):
            return
        run = reports.record_run(kind, payload, family=code.family, n=code.n, seed=options.get("seed"))
        self.stderr.write(f"recorded run {run.pk}")

    def _oracle_check(self, options: dict, state, operators) -> dict | None:
        if not options.get("oracle_check"):
            return None
        deviation = check_against_oracle(state, operators, seed=options.get("seed") or 0)
        return {"max_deviation": deviation, "operators": len(operators)}

    # ------------------------------------------------------------------
    # code
    # ------------------------------------------------------------------

    def _code_build(self, options: dict) -> None:
        code = self._code(options)
        if options.get("save"):
            save_code(code, options["save"])
        self._emit(options, {"code": code.name, "n": code.n, "generators": len(code.generators), "saved": options.get("save")})

    def _code_info(self, options: dict) -> None:
        code = self._code(options)
        params = code.params
        self._emit(
            options,
            {
                "code": code.name,
                "family": code.family,
                "n": code.n,
                "generators": len(code.generators),
                "rank": code.rank,
                **params.as_dict(),
            },
        )

    def _code_check(self, options: dict) -> None:
        if not options.get("file"):
            raise InputError("code check needs --file")
        code = self._code(options)
        self._emit(options, {"code": code.name, "n": code.n, "k": code.k, "valid": True})

    # ------------------------------------------------------------------
    # analyze
    # ------------------------------------------------------------------

    def _analyze_distance(self, options: dict) -> None:
        code = self._code(options)
        d = distance_bruteforce(code, options.get("max_weight"))
        self._emit(
            options,
            {
                "code": code.name,
                "n": code.n,
                "k": code.k,
                "d": d,
                "exhaustive": options.get("max_weight") is None,
            },
        )

    def _analyze_correctable(self, options: dict) -> None:
        code = self._code(options)
        region = Region.of(options["region"], "R")
        bad = [q for q in region.qubits if not 0 <= q < code.n]
        if bad:
            raise InputError(f"qubit ids {bad} are outside 0..{code.n - 1}")
        witness = logical_in_region(code, region)
        self._emit(
            options,
            {
                "code": code.name,
                "region": list(region.qubits),
                "correctable": is_correctable(code, region),
                "witness": witness.label if witness is not None else None,
            },
        )

    def _mesh_report(self, code: StabilizerCode, t: int):
        spec1, spec2 = default_mesh_specs(code, t)
        return mesh_logicals(code, spec1, spec2)

    def _analyze_mesh(self, options: dict) -> None:
        code = self._code(options)
        report = self._mesh_report(code, options["t"])
        self._emit(options, {"code": code.name, **MeshLogicalReportSerializer(report).data})

    def _analyze_braiding(self, options: dict) -> None:
        code = self._code(options)
        report = self._mesh_report(code, options["t"])
        triple = build_braiding_triple(code, report)
        state = code_word(code, options.get("seed"))
        phase = braiding_phase(state, triple.gamma2, triple.gamma1)
        payload = {"code": code.name, "phase": phase, "triple": BraidingTripleSerializer(triple).data}
        check = self._oracle_check(options, state, [triple.gamma1, triple.gamma2, triple.gamma2p])
        if check is not None:
            payload["oracle_check"] = check
        self._emit(options, payload)

    def _analyze_exchange(self, options: dict) -> None:
        code = self._code(options)
        triple = canonical_t_junction(code, options["junction"], options["arm_length"])
        state = code_word(code, options.get("seed"))
        payload = {
            "code": code.name,
            "phase": exchange_phase(state, triple),
            "triple": ExchangeTripleSerializer(triple).data,
        }
        check = self._oracle_check(options, state, [triple.m1, triple.m2, triple.m3])
        if check is not None:
            payload["oracle_check"] = check
        self._emit(options, payload)

    # ------------------------------------------------------------------
    # gem
    # ------------------------------------------------------------------

    def _gem_e0(self, options: dict) -> None:
        code = self._code(options)
        state = code_word(code, options.get("seed"))
        witness = best_pauli_product(state)
        payload = {
            "code": code.name,
            "n": code.n,
            "e0_bits": witness.bits,
            "overlap": witness.overlap,
            "witness": list(witness.labels),
            "search": "pauli-eigenstate products",
        }
        if options.get("oracle_check"):
            dense = oracle.max_pauli_product_overlap(oracle.from_stabilizer(state))
            if abs(dense - witness.overlap) > 1e-10:
                raise AlgebraError(f"dense scan finds overlap {dense}, exact search {witness.overlap}")
            payload["oracle_check"] = {"max_deviation": abs(dense - witness.overlap)}
        self._emit(options, payload)

    def _gem_ascend(self, options: dict) -> None:
        code = self._code(options)
        state = code_word(code, options.get("seed"))
        dense = oracle.from_stabilizer(state)
        seed = options.get("seed") or 0
        if options.get("t") is None:
            result = e0_alternating_ascent(
                dense, restarts=options["restarts"], iters=options["iters"], seed=seed, jobs=options.get("jobs")
            )
            witness = [[complex(a) for a in site] for site in result.witness]
            kind = "product"
        else:
            result = et_upper_via_circuit_ascent(
                dense,
                options["t"],
                seed=seed,
                sweeps=options["iters"],
                restarts=options["restarts"],
                jobs=options.get("jobs"),
                layout=code.layout,
            )
            witness = result.witness.as_dict()
            kind = "circuit"
        self._emit(
            options,
            {
                "code": code.name,
                "n": code.n,
                "ansatz": kind,
                "upper_bound_bits": result.bits,
                "overlap": result.overlap,
                "best_seed": result.seed,
                "sweeps": result.sweeps,
                "witness": witness,
            },
        )

    def _dressing(self, code: StabilizerCode, options: dict):
        seed = options.get("seed") or 0
        if options.get("circuit"):
            return load_circuit(options["circuit"], code.n, code.layout, options.get("locality_radius"))
        if options.get("relabel"):
            return relabeling_circuit(code.n, seed)
        if options.get("circuit_depth") is not None:
            return random_circuit(code.layout, options["circuit_depth"], seed, options.get("locality_radius"))
        return None

    def _gem_certify(self, options: dict) -> None:
        code = self._code(options)
        certificate = patch_certificate_toric(
            code,
            options["t"],
            circuit=self._dressing(code, options),
            jobs=options.get("jobs"),
            seed=options.get("seed"),
        )
        payload = reports.certificate_payload(certificate, self._params(options))
        self._emit(options, payload)
        self._record(options, "patch", payload, code)

    def _gem_theorem2(self, options: dict) -> None:
        code = self._code(options)
        certificate = theorem2_certificate(code, options["t"], jobs=options.get("jobs"))
        payload = reports.certificate_payload(certificate, self._params(options))
        self._emit(options, payload)
        self._record(options, "theorem2", payload, code)

    def _gem_sequential(self, options: dict) -> None:
        code = self._code(options)
        t = options["t"]
        spacing = code.layout.spacing
        size = options.get("patch_size") or 2.0 * (t + 1) * spacing
        gap = options.get("gap") or 1.0 * (t + 1) * spacing
        patches = partition_into_patches(code.layout, size, gap)
        if not patches:
            raise InputError(f"no patch of side {size:g} fits {code.name}")
        state = code_word(code, options.get("seed"))
        result = sequential_projection_bound(state, patches, code=code)
        payload = {
            "kind": "sequential",
            "code": code.name,
            "n": code.n,
            "t": t,
            "m": len(result.patches),
            "value": result.value,
            "bound_bits": result.bits,
            "factors": result.factors,
            "epsilon_prime": result.epsilon_prime,
            "gap_checked": result.gap_checked,
            "below_gap_power": result.value <= (1.0 - result.epsilon_prime) ** len(result.patches),
            "phases": result.phases,
            "patches": [list(p.qubits) for p in result.patches],
            "provenance": {"family": code.family, "n": code.n, "patch_size": size, "gap": gap},
        }
        if options.get("oracle_check"):
            dense = oracle.sequential_zero_probabilities(oracle.from_stabilizer(state), result.patches)
            deviation = max((abs(a - b) for a, b in zip(dense, result.factors)), default=0.0)
            if deviation > 1e-10:
                raise AlgebraError(f"dense sequential probabilities differ by {deviation:.3e}")
            payload["oracle_check"] = {"max_deviation": deviation}
        self._emit(options, payload)
        self._record(options, "sequential", payload, code)

    def _sigma(self, code: StabilizerCode, text: str):
        if text == "zero":
            return zero_state(code.n)
        labels = [token.strip() for token in text.split(",")]
        if len(labels) != code.n:
            raise InputError(f"--sigma lists {len(labels)} eigenstates for {code.n} qubits")
        return product_state(labels)

    def _gem_mixed_bound(self, options: dict) -> None:
        code = self._code(options)
        rho = symmetric_mixed_state(code)
        sigma = self._sigma(code, options["sigma"])
        value = mixed_gem_syndrome_bound(rho, sigma, code=code)
        distribution = syndrome_distribution(code, sigma)
        payload = {
            "kind": "mixed",
            "code": code.name,
            "n": code.n,
            "trace_projector_sigma": value,
            "bound_bits": -math.log2(value) if value > 0 else math.inf,
            "syndrome_dimension": distribution.dimension,
            "provenance": {"family": code.family, "n": code.n},
        }
        if options.get("oracle_check"):
            dense = oracle.projector_expectation(code.basis, oracle.from_stabilizer(sigma))
            if abs(dense - value) > 1e-10:
                raise AlgebraError(f"dense Tr(Pi_S sigma) = {dense}, exact {value}")
            payload["oracle_check"] = {"max_deviation": abs(dense - value)}
        self._emit(options, payload)
        self._record(options, "mixed", payload, code)

    # ------------------------------------------------------------------
    # oracle
    # ------------------------------------------------------------------

    def _oracle_crosscheck(self, options: dict) -> None:
        result = crosscheck(
            samples=options["samples"],
            n_max=options["n_max"],
            depth=options["depth"],
            seed=options.get("seed") or 0,
        )
        self._emit(options, result.as_dict())
        if not result.passed:
            raise AlgebraError(
                f"{len(result.failures)} of {result.samples} quantities disagree with the oracle"
            )

    # ------------------------------------------------------------------
    # report
    # ------------------------------------------------------------------

    def _report_list(self, options: dict) -> None:
        data = {
            key: options[key]
            for key in ("kind", "family", "family__in", "t", "passed")
            if options.get(key) is not None
        }
        if options.get("min_bound") is not None:
            data["min_bound"] = options["min_bound"]
        runs = CertificateRunFilter(data=data, queryset=CertificateRun.objects.all())
        if not runs.is_valid():
            raise InputError(f"invalid ledger filter: {dict(runs.errors)}")
        rows = CertificateRunSerializer(runs.qs, many=True).data
        text = reports.canonical_json_bytes([dict(row) for row in rows]).decode("utf-8")
        if options.get("output"):
            reports.write_report({"runs": [dict(row) for row in rows]}, "json", options["output"])
        self.stdout.write(text, ending="")

    def _report_show(self, options: dict) -> None:
        try:
            run = CertificateRun.objects.get(pk=options["id"])
        except CertificateRun.DoesNotExist as exc:
            raise InputError(f"no recorded run with id {options['id']}") from exc
        data, _ = reports.write_report(run.payload, "json", options.get("output"))
        self.stdout.write(data.decode("utf-8"), ending="")
        if options.get("export"):
            path = reports.default_output(f"{run.kind.lower()}-{run.pk}", "json")
            reports.write_report(run.payload, "json", path)
            self.stderr.write(f"wrote {path}")
