# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Command-line front end. Times are given in tau0 units and energies in μeV.

    geoqubit simulate --process i --tau 500 --out run.csv
    geoqubit phases --process ii --chi0 2.0944 --omega 1.7601
    geoqubit calibrate --gamma 4.71238898
    geoqubit fig2 --out fig2.csv
    geoqubit fig3 --out fig3.csv
    geoqubit gates --xor-check

Exit codes: 0 success, 2 invalid input, 3 integration failure, 4 I/O failure.
"""
import argparse
import contextlib
import inspect
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np
from tqdm import tqdm

from .calibration import gamma_to_chi0, numeric_zero_dynamic, omega_zero_dynamic
from .data import (
    ProcessIIParams,
    ProcessIParams,
    Schedule,
    format_gate_table,
    format_report,
    hold,
    parse_tabulated,
    process_i,
    process_ii,
    write_trajectory_csv,
    write_two_qubit_csv,
)
from .dynamics import (
    IntegrationError,
    IntegratorConfig,
    adiabaticity_trace,
    cyclicity_check,
    evolve_bloch,
    evolve_state,
)
from .models import (
    CNOT,
    BlochVector,
    ControlPoint,
    CouplingParams,
    CyclicBasis,
    DeviceParams,
    SpinState,
    aligned_state,
    branch_operator,
    conditional_chi0,
    conditional_gate,
    cyclic_gate,
    effective_field,
    full_two_qubit_evolve,
    ground_state,
    is_unitary,
    measure_p1,
    measure_p1_closed,
    off_diagonal_mass,
    process_ii_conditional,
    spin_state,
    two_qubit_operator_from_branches,
    u1_sq,
    u2_sq,
    xor_compose,
)
from .phases import PHASE_METHODS, aa_phase, adiabatic_phase, decompose, pancharatnam_line_integral, wrap_phase
from .utils import create_small_table, create_sweep_table, get_callable_dict, setup_logger

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4

FIG2_TAUS = (10.0, 50.0, 150.0, 500.0, 2000.0)
FIG3_TAUS = (50.0, 100.0, 150.0, 300.0, 500.0, 1000.0, 2000.0)

INITIAL_STATES = ('auto', 'aligned', 'cyclic', 'prepared')

GATES = get_callable_dict([u1_sq, u2_sq, cyclic_gate, conditional_gate, xor_compose])


@dataclass(frozen=True)
class RunConfig:
    """
    A fully resolved single run: device, schedule, integrator and initial
    state. ``chi0`` and ``omega`` are set for process II runs.
    """
    device: DeviceParams
    schedule: Schedule
    integrator: IntegratorConfig
    initial: str = 'auto'
    out: Optional[str] = None
    seed: int = 0
    chi0: Optional[float] = None
    omega: Optional[float] = None

    @staticmethod
    def add_argparse_args(parent_parser):
        parser = argparse.ArgumentParser(parents=[parent_parser], add_help=False)
        parser.add_argument('--process', default='i', choices=('i', 'ii', 'tabulated'),
                            help='control schedule (default: i)')
        parser.add_argument('--tau', default=500.0, type=float,
                            help='process I duration in tau0 units (default: 500)')
        parser.add_argument('--phi-m', default=0.25, type=float,
                            help='process I flux corner in flux quanta (default: 0.25)')
        parser.add_argument('--nxm', default=0.20, type=float,
                            help='process I gate-charge corner (default: 0.20)')
        parser.add_argument('--chi0', default=None, type=float,
                            help='process II polar angle in radians')
        parser.add_argument('--gamma', default=None, type=float,
                            help='process II target geometric phase, sets chi0 = acos(1 - gamma/pi)')
        parser.add_argument('--omega', default=None, type=float,
                            help='process II drive in 1/tau0, signed (default: dynamic-phase free)')
        parser.add_argument('--schedule-file', default=None,
                            help='tabulated schedule with header t,flux,gate_charge')
        parser.add_argument('--initial', default='auto', choices=INITIAL_STATES,
                            help='initial state: aligned with B(0), the process II cyclic state, '
                            'or the ground state prepared at flux 0 and gate charge 0 (default: auto)')
        return parser

    @classmethod
    def from_argparse_args(cls, args):
        device = _device(args)
        cfg = IntegratorConfig.from_argparse_args(args)
        chi0 = omega = None
        if args.process == 'i':
            schedule = process_i(ProcessIParams(args.phi_m, args.nxm, args.tau))
        elif args.process == 'ii':
            chi0, omega = _process_ii_drive(device, args)
            schedule = process_ii(device, ProcessIIParams(chi0, omega))
        else:
            if args.schedule_file is None:
                raise ValueError("--process tabulated needs --schedule-file")
            with open(args.schedule_file, 'r', encoding='utf-8') as f:
                schedule = parse_tabulated(f.read(), params=device)
        if args.initial == 'cyclic' and chi0 is None:
            raise ValueError("--initial cyclic is only defined for --process ii")
        return cls(device, schedule, cfg, initial=args.initial, out=args.out, seed=args.seed,
                   chi0=chi0, omega=omega)

    def initial_state(self) -> SpinState:
        initial = self.initial
        if initial == 'auto':
            initial = 'cyclic' if self.chi0 is not None else 'aligned'
        if initial == 'cyclic':
            return spin_state(self.chi0, 0.0)
        if initial == 'prepared':
            return ground_state(self.device)
        return aligned_state(effective_field(self.device, self.schedule.evaluate(0.0)))


def _device(args) -> DeviceParams:
    return DeviceParams(args.e1, args.e2, args.ech)


def _process_ii_drive(device: DeviceParams, args):
    if args.chi0 is not None and args.gamma is not None:
        raise ValueError("Give either --chi0 or --gamma, not both")
    if args.gamma is not None:
        chi0 = gamma_to_chi0(args.gamma)
    elif args.chi0 is not None:
        chi0 = args.chi0
    else:
        raise ValueError("--process ii needs --chi0 or --gamma")
    omega = args.omega if args.omega is not None else omega_zero_dynamic(device, chi0).omega
    return chi0, omega


def get_args_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--e1', default=1.5625, type=float,
                        help='Josephson energy of junction 1 in μeV (default: 1.5625)')
    common.add_argument('--e2', default=6.25, type=float,
                        help='Josephson energy of junction 2 in μeV (default: 6.25)')
    common.add_argument('--ech', default=39.0625, type=float,
                        help='charging energy in μeV (default: 39.0625)')
    common.add_argument('--out', default=None,
                        help='output path, standard output when omitted')
    common.add_argument('--seed', default=0, type=int,
                        help='random seed for property sweeps (default: 0)')
    common.add_argument('--workers', default=1, type=int, metavar='N',
                        help='parallel processes for sweeps (default: 1)')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    common.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    common = IntegratorConfig.add_argparse_args(common)
    run = RunConfig.add_argparse_args(common)

    parser = argparse.ArgumentParser('geoqubit', description='Geometric phases of a Josephson charge qubit')
    subparsers = parser.add_subparsers(dest='command', required=True)

    simulate = subparsers.add_parser('simulate', parents=[run], help='write a trajectory CSV')
    simulate.set_defaults(func=cmd_simulate)

    phases = subparsers.add_parser('phases', parents=[run], help='write a phase report')
    phases.add_argument('--method', default=PHASE_METHODS[0], choices=PHASE_METHODS,
                        help='phase extraction method (default: overlap-minus-dynamic)')
    phases.add_argument('--allow-noncyclic', action='store_true',
                        help='accept open paths, the open-path endpoint term is then included')
    phases.add_argument('--cyclic-tol', default=1e-5, type=float,
                        help='tolerance on |n(tau) - n(0)| (default: 1e-5)')
    phases.set_defaults(func=cmd_phases)

    calibrate = subparsers.add_parser('calibrate', parents=[common], help='dynamic-phase free drive')
    target = calibrate.add_mutually_exclusive_group(required=True)
    target.add_argument('--gamma', type=float, help='target geometric phase in [0, 2 pi]')
    target.add_argument('--chi0', type=float, help='polar angle in (0, pi)')
    calibrate.add_argument('--method', default='analytic', choices=('analytic', 'numeric'),
                           help='closed form or root finding on the simulated phase')
    calibrate.add_argument('--winding', default=0, type=int,
                           help='dynamic phase per period in units of 2 pi (default: 0)')
    calibrate.add_argument('--bracket', default=None, type=float, nargs=2, metavar=('LO', 'HI'),
                           help='frequency bracket for --method numeric')
    calibrate.add_argument('--coherence-time', default=None, type=float,
                           help='coherence time in tau0 units, reports how many gate periods fit in it')
    calibrate.set_defaults(func=cmd_calibrate)

    fig2 = subparsers.add_parser('fig2', parents=[common], help='adiabaticity sweep over process I')
    fig2.add_argument('--taus', default=list(FIG2_TAUS), type=float, nargs='+',
                      help='durations in tau0 units')
    fig2.add_argument('--phi-m', default=0.25, type=float, help='flux corner (default: 0.25)')
    fig2.add_argument('--nxm', default=0.20, type=float, help='gate-charge corner (default: 0.20)')
    fig2.add_argument('--trace-out', default=None,
                      help='also write the n_z and field-direction traces to this path')
    fig2.set_defaults(func=cmd_fig2)

    fig3 = subparsers.add_parser('fig3', parents=[common], help='adiabatic vs nonadiabatic phase sweep')
    fig3.add_argument('--taus', default=list(FIG3_TAUS), type=float, nargs='+',
                      help='process II periods in tau0 units')
    fig3.add_argument('--chi0', default=2.0 * math.pi / 3.0, type=float,
                      help='polar angle of the cyclic state (default: 2 pi / 3)')
    fig3.set_defaults(func=cmd_fig3)

    gates = subparsers.add_parser('gates', parents=[CouplingParams.add_argparse_args(common)],
                                  help='gate matrices and checks')
    gates.add_argument('--gate', default=None, help=f"gate by name: {', '.join(GATES)}")
    gates.add_argument('--gamma', default=math.pi / 2, type=float, help='gate angle (default: pi/2)')
    gates.add_argument('--gamma1', default=0.0, type=float, help='second angle of conditional_gate')
    gates.add_argument('--theta-i', default=0.0, type=float, help='cyclic axis polar angle')
    gates.add_argument('--varphi-i', default=0.0, type=float, help='cyclic axis azimuth')
    gates.add_argument('--u1', default=None, type=float, metavar='GAMMA', help='shortcut for --gate u1_sq')
    gates.add_argument('--u2', default=None, type=float, metavar='GAMMA', help='shortcut for --gate u2_sq')
    gates.add_argument('--xor-check', action='store_true', help='compose and check the XOR gate')
    gates.add_argument('--p1-check', default=0, type=int, metavar='N',
                       help='compare both read-out probability forms on N random points')
    gates.add_argument('--conditional', action='store_true',
                       help='assemble the two-qubit conditional gate from frozen-control runs')
    gates.add_argument('--nx-control', default=0.2, type=float, help='control gate charge (default: 0.2)')
    gates.add_argument('--chi0', default=2.0 * math.pi / 3.0, type=float,
                       help='target polar angle for --conditional (default: 2 pi / 3)')
    gates.add_argument('--report', default=None, help='write the key=value report to this path')
    gates.add_argument('--trace-out', default=None,
                       help='with --conditional, write the two-qubit trajectory of the control-1 run')
    gates.set_defaults(func=cmd_gates)

    return parser


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == '-':
        yield sys.stdout
    else:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            yield f


def _sweep(fn: Callable, items: List, workers: int, desc: str, quiet: bool) -> List:
    """
    Map ``fn`` over ``items``; results keep the order of ``items``.
    """
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(tqdm(executor.map(fn, items), total=len(items), desc=desc, disable=quiet))
    return [fn(item) for item in tqdm(items, desc=desc, disable=quiet)]


def cmd_simulate(args):
    run = RunConfig.from_argparse_args(args)
    traj = evolve_state(run.device, run.schedule, run.initial_state(), run.integrator)
    logger.info(f"Simulated {run.schedule!r}, norm drift {traj.norm_drift:.3g}")
    with _output(run.out) as stream:
        write_trajectory_csv(traj, stream)


def cmd_phases(args):
    run = RunConfig.from_argparse_args(args)
    traj = evolve_state(run.device, run.schedule, run.initial_state(), run.integrator)
    result = decompose(traj, method=args.method, tol=args.cyclic_tol, allow_noncyclic=args.allow_noncyclic)
    report = {
        'total': result.total,
        'dynamic': result.dynamic,
        'geometric': result.geometric,
        'winding': result.winding,
        'method': result.method,
        'cyclic_residual': cyclicity_check(traj, args.cyclic_tol).residual,
        'tau_over_tau0': run.schedule.tau,
        'tau_ns': run.device.to_ns(run.schedule.tau),
    }
    if run.chi0 is not None:
        report['closed_form'] = wrap_phase(aa_phase(run.chi0, run.omega))[0]
    logger.info('\n' + create_small_table({k: v for k, v in report.items() if k != 'method'}))
    with _output(run.out) as stream:
        stream.write(format_report(report))


def cmd_calibrate(args):
    device = _device(args)
    if args.coherence_time is not None and not args.coherence_time > 0.0:
        raise ValueError(f"--coherence-time must be positive, got {args.coherence_time}")
    chi0 = gamma_to_chi0(args.gamma) if args.gamma is not None else args.chi0
    if args.method == 'numeric':
        result = numeric_zero_dynamic(
            device, chi0, bracket=args.bracket, cfg=IntegratorConfig.from_argparse_args(args),
            winding=args.winding)
    else:
        result = omega_zero_dynamic(device, chi0, winding=args.winding)
    report = {
        'chi0': result.chi0,
        'omega': result.omega,
        'tau_over_tau0': result.tau,
        'tau_ns': result.tau_ns(device),
        'gamma': result.gamma_target,
        'winding': result.winding,
        'residual': result.residual_dynamic_phase,
        'method': result.method,
    }
    if args.coherence_time is not None:
        report['coherence_time'] = args.coherence_time
        report['operations'] = args.coherence_time / result.tau
    with _output(args.out) as stream:
        stream.write(format_report(report))


def _fig2_point(job):
    device, phi_m, nxm, tau, cfg = job
    sched = process_i(ProcessIParams(phi_m, nxm, tau))
    n0 = BlochVector.from_array(effective_field(device, sched.evaluate(0.0)).as_array(), normalize=True)
    trace = adiabaticity_trace(evolve_bloch(device, sched, n0, cfg))
    return tau, trace


def cmd_fig2(args):
    device = _device(args)
    cfg = IntegratorConfig.from_argparse_args(args)
    jobs = [(device, args.phi_m, args.nxm, tau, cfg) for tau in sorted(args.taus)]
    results = _sweep(_fig2_point, jobs, args.workers, 'fig2', args.quiet)
    rows = [{'tau': tau, 'max_z_deviation': trace.max_z_deviation, 'max_deviation': trace.max_deviation}
            for tau, trace in results]
    logger.info('\n' + create_sweep_table(rows))
    with _output(args.out) as stream:
        stream.write('tau,max_z_deviation,max_deviation\n')
        for row in rows:
            stream.write(f"{row['tau']:.12g},{row['max_z_deviation']:.12g},{row['max_deviation']:.12g}\n")
    if args.trace_out is not None:
        with _output(args.trace_out) as stream:
            stream.write('tau,t,n_z,bhat_z\n')
            for tau, trace in results:
                for t, nz, bz in zip(trace.times, trace.nz, trace.bhat_z):
                    stream.write(f"{tau:.12g},{t:.12g},{nz:.12g},{bz:.12g}\n")


def _fig3_point(job):
    device, chi0, tau, cfg = job
    omega = 2.0 * math.pi / tau
    sched = process_ii(device, ProcessIIParams(chi0, omega))
    traj = evolve_bloch(device, sched, BlochVector.from_angles(chi0, 0.0), cfg)
    gamma = pancharatnam_line_integral(traj)
    gamma_a = adiabatic_phase(device, sched, cfg)
    return {
        'tau': tau,
        'omega': omega,
        'gamma': gamma,
        'gamma_a': gamma_a,
        'closed_form': aa_phase(chi0, omega),
        'deviation': abs(wrap_phase(gamma - gamma_a)[0]),
    }


def cmd_fig3(args):
    device = _device(args)
    cfg = IntegratorConfig.from_argparse_args(args)
    jobs = [(device, args.chi0, tau, cfg) for tau in sorted(args.taus)]
    rows = _sweep(_fig3_point, jobs, args.workers, 'fig3', args.quiet)
    logger.info('\n' + create_sweep_table(rows))
    with _output(args.out) as stream:
        stream.write(','.join(rows[0].keys()) + '\n')
        for row in rows:
            stream.write(','.join(f"{value:.12g}" for value in row.values()) + '\n')


def _named_gate(name: str, args) -> np.ndarray:
    if name not in GATES:
        raise ValueError(f"Unknown gate {name!r}, known gates: {', '.join(GATES)}")
    fn = GATES[name]
    values = {'gamma': args.gamma, 'gamma0': args.gamma, 'gamma1': args.gamma1,
              'theta_i': args.theta_i, 'varphi_i': args.varphi_i}
    return fn(**{key: values[key] for key in inspect.signature(fn).parameters})


def _xor_report() -> dict:
    u = xor_compose()
    exchange = np.array([[0, 1], [-1, 0]], dtype=complex)
    return {
        'unitary': is_unitary(u),
        'control0_block_error': float(np.linalg.norm(u[:2, :2] - np.eye(2))),
        'control1_block_error': float(np.linalg.norm(u[2:, 2:] - exchange)),
        'cnot_modulus_error': float(np.max(np.abs(np.abs(u) - np.abs(CNOT)))),
    }


def _p1_report(count: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for eta, theta_i, gamma in rng.uniform(0.0, math.pi, size=(count, 3)):
        basis = CyclicBasis.from_angles(theta_i, 0.0, eta)
        worst = max(worst, abs(measure_p1(basis, gamma) - measure_p1_closed(eta, theta_i, gamma)))
    return {'p1_points': count, 'p1_max_difference': worst}


def _conditional_report(args):
    device = _device(args)
    cfg = IntegratorConfig.from_argparse_args(args)
    coupling = CouplingParams.from_argparse_args(args)
    omega = omega_zero_dynamic(device, args.chi0).omega
    p = ProcessIIParams(args.chi0, omega)
    control = hold(ControlPoint(0.0, args.nx_control), p.tau)
    branches, chi0s, trace = [], [], None
    for l in (0, 1):
        sched = process_ii_conditional(device, p, coupling, args.nx_control, l)
        branches.append(branch_operator(device, device, (control, sched), coupling, l, cfg))
        chi0s.append(conditional_chi0(device, args.chi0, coupling, args.nx_control, l))
        if l == 1 and args.trace_out is not None:
            psi0 = np.kron([0.0, 1.0], spin_state(chi0s[-1], 0.0).as_array())
            trace = full_two_qubit_evolve(device, device, (control, sched), coupling, psi0, cfg, True)
    u = two_qubit_operator_from_branches(branches, chi0s)
    if trace is not None:
        with _output(args.trace_out) as stream:
            write_two_qubit_csv(trace.times, trace.states, stream)
    report = {
        'omega': omega,
        'chi0_0': chi0s[0],
        'chi0_1': chi0s[1],
        'gamma_0': aa_phase(chi0s[0], omega),
        'gamma_1': aa_phase(chi0s[1], omega),
        'off_diagonal_mass': off_diagonal_mass(u),
    }
    return u, report


def cmd_gates(args):
    report = {}
    u = None
    if args.xor_check:
        u = xor_compose()
        report.update(_xor_report())
    if args.p1_check:
        report.update(_p1_report(args.p1_check, args.seed))
    if args.conditional:
        u, conditional = _conditional_report(args)
        report.update(conditional)
    name = args.gate
    if args.u1 is not None:
        name, args.gamma = 'u1_sq', args.u1
    elif args.u2 is not None:
        name, args.gamma = 'u2_sq', args.u2
    if name is not None:
        u = _named_gate(name, args)
        report.update({'gate': name, 'unitary': is_unitary(u)})
    if u is None and not report:
        raise ValueError(f"Nothing to do, pick a gate ({', '.join(GATES)}) or a check")

    if u is not None:
        with _output(args.out) as stream:
            stream.write(format_gate_table(u))
    if args.report is not None:
        with _output(args.report) as stream:
            stream.write(format_report(report))
    elif report:
        logger.info('\n' + create_small_table(report))


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = get_args_parser()
    args = parser.parse_args(argv)
    setup_logger(1 if args.verbose else (-1 if args.quiet else 0))
    try:
        args.func(args)
    except IntegrationError as e:
        logger.error(f"Integration failed: {e}")
        return EXIT_INTEGRATION
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO
    except ValueError as e:
        logger.error(str(e))
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
