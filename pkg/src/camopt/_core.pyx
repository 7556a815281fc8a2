# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False
"""Compiled episode loop: typed transliteration of _pyloop.run_episode.

Expression-for-expression identical to the pure-Python twin so the two
backends produce matching trajectories (the build also disables FP
contraction, see setup.py). Index constants are read from packing.py at
module load, keeping a single source of truth for the layout.
"""

from libc.math cimport acos, atan2, cos, exp, fabs, floor, fmod, sin, sqrt

from . import packing as _pk

cdef double TWO_PI = 2.0 * 3.141592653589793

cdef int P_DT = _pk.P_DT
cdef int P_DECIM = _pk.P_DECIM
cdef int P_BASE_MASS = _pk.P_BASE_MASS
cdef int P_BASE_INERTIA = _pk.P_BASE_INERTIA
cdef int P_HIP_X = _pk.P_HIP_X
cdef int P_HIP_Z = _pk.P_HIP_Z
cdef int P_THIGH_MASS = _pk.P_THIGH_MASS
cdef int P_THIGH_LEN = _pk.P_THIGH_LEN
cdef int P_THIGH_COM = _pk.P_THIGH_COM
cdef int P_THIGH_INERTIA = _pk.P_THIGH_INERTIA
cdef int P_SHANK_MASS = _pk.P_SHANK_MASS
cdef int P_SHANK_LEN = _pk.P_SHANK_LEN
cdef int P_SHANK_COM = _pk.P_SHANK_COM
cdef int P_SHANK_INERTIA = _pk.P_SHANK_INERTIA
cdef int P_GRAVITY = _pk.P_GRAVITY
cdef int P_TORQUE_LIMIT = _pk.P_TORQUE_LIMIT
cdef int P_VEL_LIMIT = _pk.P_VEL_LIMIT
cdef int P_KN = _pk.P_KN
cdef int P_DN = _pk.P_DN
cdef int P_MU = _pk.P_MU
cdef int P_VREG = _pk.P_VREG
cdef int P_FREQ = _pk.P_FREQ
cdef int P_DUTY = _pk.P_DUTY
cdef int P_CLEAR = _pk.P_CLEAR
cdef int P_HNOM = _pk.P_HNOM
cdef int P_MAXSTEP = _pk.P_MAXSTEP
cdef int P_KP = _pk.P_KP
cdef int P_KD = _pk.P_KD
cdef int P_VGAIN = _pk.P_VGAIN
cdef int P_SHIFT_LIM = _pk.P_SHIFT_LIM
cdef int P_STAND_GATE = _pk.P_STAND_GATE
cdef int P_ATT_KP = _pk.P_ATT_KP
cdef int P_ATT_KD = _pk.P_ATT_KD
cdef int P_HEIGHT_KP = _pk.P_HEIGHT_KP
cdef int P_HEIGHT_KD = _pk.P_HEIGHT_KD
cdef int P_HIP_MOMENT = _pk.P_HIP_MOMENT
cdef int P_SWING_FF = _pk.P_SWING_FF
cdef int P_ATT_REF = _pk.P_ATT_REF
cdef int P_PITCH_STEP = _pk.P_PITCH_STEP
cdef int P_PHASE_F = _pk.P_PHASE_F
cdef int P_PHASE_H = _pk.P_PHASE_H
cdef int P_PHASE_INIT = _pk.P_PHASE_INIT
cdef int P_W_TRACK = _pk.P_W_TRACK
cdef int P_W_STAB = _pk.P_W_STAB
cdef int P_W_ACT = _pk.P_W_ACT
cdef int P_W_TORQUE = _pk.P_W_TORQUE
cdef int P_W_VEL = _pk.P_W_VEL
cdef int P_W_SLIP = _pk.P_W_SLIP
cdef int P_FALL_Z = _pk.P_FALL_Z
cdef int P_FALL_PITCH = _pk.P_FALL_PITCH
cdef int P_BLOWUP = _pk.P_BLOWUP
cdef int P_HIP_LO = _pk.P_HIP_LO
cdef int P_HIP_HI = _pk.P_HIP_HI
cdef int P_KNEE_LO = _pk.P_KNEE_LO
cdef int P_KNEE_HI = _pk.P_KNEE_HI

cdef int T_X = _pk.T_X
cdef int T_Z = _pk.T_Z
cdef int T_PITCH = _pk.T_PITCH
cdef int T_VX = _pk.T_VX
cdef int T_VZ = _pk.T_VZ
cdef int T_PITCHRATE = _pk.T_PITCHRATE
cdef int T_Q_HF = _pk.T_Q_HF
cdef int T_QD_HF = _pk.T_QD_HF
cdef int T_TAU_HF = _pk.T_TAU_HF
cdef int T_TAUS_F = _pk.T_TAUS_F
cdef int T_CONTACT_F = _pk.T_CONTACT_F
cdef int T_CMD = _pk.T_CMD
cdef int T_REWARD = _pk.T_REWARD
cdef int T_R_TRACK = _pk.T_R_TRACK
cdef int T_R_STAB = _pk.T_R_STAB
cdef int T_R_ACT = _pk.T_R_ACT
cdef int T_R_TORQUE = _pk.T_R_TORQUE
cdef int T_R_VEL = _pk.T_R_VEL
cdef int T_R_SLIP = _pk.T_R_SLIP
cdef int T_SLIP_INC = _pk.T_SLIP_INC
cdef int T_IK_CLAMPED = _pk.T_IK_CLAMPED

cdef int A_TICKS = _pk.A_TICKS
cdef int A_STATUS = _pk.A_STATUS
cdef int A_TORQUE_SQ_INT = _pk.A_TORQUE_SQ_INT
cdef int A_SLIP_TOTAL = _pk.A_SLIP_TOTAL
cdef int A_LIMIT_VIOL = _pk.A_LIMIT_VIOL
cdef int A_END_TIME = _pk.A_END_TIME
cdef int A_FINAL_Q = _pk.A_FINAL_Q
cdef int A_FINAL_QD = _pk.A_FINAL_QD

cdef int STATUS_OK = _pk.STATUS_OK
cdef int STATUS_FELL = _pk.STATUS_FELL
cdef int STATUS_BLOWUP = _pk.STATUS_BLOWUP


cdef inline double _terrain_height(
    const double[::1] terr_h, double terr_x0, double terr_dx, double x
) noexcept nogil:
    cdef Py_ssize_t n = terr_h.shape[0]
    cdef Py_ssize_t i
    cdef double s, f
    if n == 0:
        return 0.0
    s = (x - terr_x0) / terr_dx
    i = <Py_ssize_t>floor(s)
    if i < 0:
        return terr_h[0]
    if i >= n - 1:
        return terr_h[n - 1]
    f = s - i
    return terr_h[i] * (1.0 - f) + terr_h[i + 1] * f


cdef inline double _table_eval(
    const double[::1] tab_tau,
    const double[::1] tab_slope,
    double q0,
    double dq,
    double q,
) noexcept nogil:
    cdef Py_ssize_t n = tab_tau.shape[0]
    cdef Py_ssize_t i
    cdef double s, f, omf, h00, h10, h01, h11
    s = (q - q0) / dq
    if s <= 0.0:
        return tab_tau[0]
    if s >= n - 1:
        return tab_tau[n - 1]
    i = <Py_ssize_t>floor(s)
    f = s - i
    omf = 1.0 - f
    h00 = (1.0 + 2.0 * f) * omf * omf
    h10 = f * omf * omf
    h01 = f * f * (3.0 - 2.0 * f)
    h11 = f * f * (f - 1.0)
    return (
        h00 * tab_tau[i]
        + h10 * dq * tab_slope[i]
        + h01 * tab_tau[i + 1]
        + h11 * dq * tab_slope[i + 1]
    )


cdef int _run(
    const double[::1] P,
    const double[::1] q0,
    const double[::1] qd0,
    const double[::1] commands,
    const double[:, ::1] pushes,
    const double[::1] terr_h,
    double terr_x0,
    double terr_dx,
    const double[::1] tab_tau,
    const double[::1] tab_slope,
    double tab_q0,
    double tab_dq,
    double[:, ::1] trace,
    double[::1] agg,
) noexcept nogil:
    cdef double dt = P[P_DT]
    cdef int decim = <int>P[P_DECIM]
    cdef Py_ssize_t n_ticks = trace.shape[0]
    cdef double dt_ctrl = dt * decim

    cdef double m_b = P[P_BASE_MASS]
    cdef double i_b = P[P_BASE_INERTIA]
    cdef double hip_x = P[P_HIP_X]
    cdef double hip_z = P[P_HIP_Z]
    cdef double m_t = P[P_THIGH_MASS]
    cdef double l1 = P[P_THIGH_LEN]
    cdef double c1 = P[P_THIGH_COM]
    cdef double i_t = P[P_THIGH_INERTIA]
    cdef double m_s = P[P_SHANK_MASS]
    cdef double l2 = P[P_SHANK_LEN]
    cdef double c2 = P[P_SHANK_COM]
    cdef double i_s = P[P_SHANK_INERTIA]
    cdef double grav = P[P_GRAVITY]
    cdef double tau_lim = P[P_TORQUE_LIMIT]
    cdef double vel_lim = P[P_VEL_LIMIT]
    cdef double kn = P[P_KN]
    cdef double dn = P[P_DN]
    cdef double mu = P[P_MU]
    cdef double vreg = P[P_VREG]
    cdef double freq = P[P_FREQ]
    cdef double duty = P[P_DUTY]
    cdef double clear = P[P_CLEAR]
    cdef double hnom = P[P_HNOM]
    cdef double maxstep = P[P_MAXSTEP]
    cdef double kp = P[P_KP]
    cdef double kd = P[P_KD]
    cdef double vgain = P[P_VGAIN]
    cdef double shift_lim = P[P_SHIFT_LIM]
    cdef double stand_gate = P[P_STAND_GATE]
    cdef double att_kp = P[P_ATT_KP]
    cdef double att_kd = P[P_ATT_KD]
    cdef double kz = P[P_HEIGHT_KP]
    cdef double kdz = P[P_HEIGHT_KD]
    cdef double hip_mg = P[P_HIP_MOMENT]
    cdef double swff = P[P_SWING_FF]
    cdef double att_ref = P[P_ATT_REF]
    cdef double psg = P[P_PITCH_STEP]
    cdef double blowup = P[P_BLOWUP]
    cdef double r_max = l1 + l2 - 1e-3
    cdef double r_min = fabs(l1 - l2) + 1e-3

    cdef double q[7]
    cdef double qd[7]
    cdef Py_ssize_t i, j
    for i in range(7):
        q[i] = q0[i]
        qd[i] = qd0[i]

    cdef Py_ssize_t n_push = pushes.shape[0]
    cdef Py_ssize_t push_i = 0

    cdef double qdes[4]
    cdef double qdes1[4]
    cdef double qdes2[4]
    cdef double tau_cmd[4]
    cdef double ff[4]
    cdef double tau_s_tick[2]
    cdef double p_leg[2]
    cdef double planted[2]
    cdef double share[2]
    cdef double sal[2]
    cdef double sbe[2]
    cdef double arm[2]
    cdef double place[2]
    cdef int was_st[2]
    cdef int in_st
    for j in range(4):
        qdes[j] = 0.0
        qdes1[j] = 0.0
        qdes2[j] = 0.0
        tau_cmd[j] = 0.0
        ff[j] = 0.0
    for j in range(2):
        place[j] = 0.0
        was_st[j] = 0
    cdef double slip_window = 0.0
    cdef double torque_sq = 0.0
    cdef double slip_total = 0.0
    cdef double limit_viol = 0.0
    cdef int status = STATUS_OK
    cdef double t = 0.0
    cdef Py_ssize_t ticks_done = 0

    cdef double M[7][7]
    cdef double L[7][7]
    cdef double rhs[7]
    cdef double acc[7]

    cdef double w_total = (m_b + 2.0 * (m_t + m_s)) * grav
    cdef double span = TWO_PI * duty

    cdef Py_ssize_t tick, leg, sub, k2, ih, ik
    cdef int ok, bad, viol
    cdef double t_tick, cmd, base_phase, ik_clamped, shift, gate, lo, wb
    cdef double ph, p, u, tot, sp_c, cp_c, fn_des, m_des, side, al, be
    cdef double dhip, pterm
    cdef double w_pair, denom, delta, m_resid, step, half, s, ss, tx, tz
    cdef double r, ck, qk, gt, cpsi, psi, fn, fxw, tau
    cdef double vx, vz, wp, err, r_track, r_stab, sm, d2, r_act, tq
    cdef double r_torque, ve, e, r_vel, r_slip, reward
    cdef double sp, cp, hx, hz, fx, fz, gap
    cdef double push_fx, push_fz, push_tau
    cdef double x, z, rx, rz, sa, ca, sb, cb, ald, bed
    cdef double knx, knz, ctx, ctz, csx, csz
    cdef double t2x, t2z, t3x, t3z, s2x, s2z, s3x, s3z, s4x, s4z
    cdef double ahx, ahz, aknx, aknz, atx, atz, asx, asz
    cdef double fx_t, fz_t, fx_s, fz_s
    cdef double ftx, ftz, vhx, vhz, vfx, vfz, ft, ex
    cdef double f2x, f2z, f3x, f3z, f4x, f4z
    cdef double ts_f, ts_h, sat, sw, hj, aff, pref

    for tick in range(n_ticks):
        t_tick = tick * dt_ctrl
        cmd = commands[tick]
        # ---- controller: FTG + IK + feedforward + PD -----------------------
        base_phase = P[P_PHASE_INIT] + TWO_PI * freq * t_tick
        ik_clamped = 0.0
        # full Raibert placement: land at the neutral point for the speed
        # the body actually has, plus feedback on the speed error. The
        # clock target alone lands the foot for the commanded speed, and
        # while below it every touchdown overstrides: a braking push at
        # ground level that also torques the nose down.
        shift = (qd[0] * duty - cmd) / (2.0 * freq) + vgain * (qd[0] - cmd)
        if shift > shift_lim:
            shift = shift_lim
        elif shift < -shift_lim:
            shift = -shift_lim
        gate = fabs(cmd) / stand_gate
        if gate > 1.0:
            gate = 1.0
        gate = gate * gate * (3.0 - 2.0 * gate)
        # expected support share per leg: a swing leg is unloaded, but a
        # gated-down "swing" leg while standing is really still planted.
        # Shares blend smoothly across liftoff and touchdown so the load
        # handover does not step the stance forces discontinuously.
        lo = 1.0 - gate
        wb = 0.08 * TWO_PI
        for leg in range(2):
            ph = base_phase + (P[P_PHASE_F] if leg == 0 else P[P_PHASE_H])
            p = fmod(ph, TWO_PI)
            if p < 0.0:
                p += TWO_PI
            p_leg[leg] = p
            if p < span:
                if p >= span - wb:
                    u = (span - p) / wb
                    u = u * u * (3.0 - 2.0 * u)
                    planted[leg] = lo + (1.0 - lo) * u
                else:
                    planted[leg] = 1.0
            elif p >= TWO_PI - wb:
                u = (p - (TWO_PI - wb)) / wb
                u = u * u * (3.0 - 2.0 * u)
                planted[leg] = lo + (1.0 - lo) * u
            else:
                planted[leg] = lo
        tot = planted[0] + planted[1]
        for leg in range(2):
            share[leg] = planted[leg] / tot if tot > 1e-12 else 0.0
        # stance force distribution: total vertical support force from the
        # weight plus a height servo, and a righting pitch moment. In double
        # support the moment comes from a front/hind force difference, which
        # cannot push the body sideways; whatever cannot be realized that way
        # is applied as stance-hip torque whose reaction rights the body.
        sp_c = sin(q[2])
        cp_c = cos(q[2])
        fn_des = w_total + kz * (hnom - q[1]) - kdz * qd[1]
        if fn_des < 0.0:
            fn_des = 0.0
        pref = att_ref * (planted[0] - planted[1])
        m_des = -(att_kp * (q[2] - pref) + att_kd * qd[2])
        for leg in range(2):
            side = 1.0 if leg == 0 else -1.0
            al = q[2] + q[3 + 2 * leg]
            be = al - q[4 + 2 * leg]
            sal[leg] = sin(al)
            sbe[leg] = sin(be)
            arm[leg] = (
                cp_c * side * hip_x - sp_c * hip_z
                + l1 * sal[leg] + l2 * sbe[leg]
            )
        w_pair = 4.0 * share[0] * share[1]
        denom = arm[0] - arm[1]
        delta = w_pair * m_des / denom if fabs(denom) > 0.05 else 0.0
        m_resid = hip_mg * (1.0 - w_pair) * m_des
        for leg in range(2):
            p = p_leg[leg]
            step = cmd / (2.0 * freq)
            if step > maxstep:
                step = maxstep
            elif step < -maxstep:
                step = -maxstep
            half = step
            # feet aim at the ground plane under the base: hanging the
            # target off the hip couples pitch into foot height, and a
            # nose-down excursion then lifts the rear target clear of the
            # ground exactly when its support is needed most
            side = 1.0 if leg == 0 else -1.0
            dhip = sp_c * side * hip_x + (cp_c - 1.0) * hip_z
            if p < span:
                s = p / span
                tx = half * (1.0 - 2.0 * s)
                tz = -hnom - dhip
            else:
                s = (p - span) / (TWO_PI - span)
                ss = s * s * (3.0 - 2.0 * s)
                tx = half * (-1.0 + 2.0 * ss)
                u = 2.0 * s
                if u > 2.0 - u:
                    u = 2.0 - u
                if u < 0.0:
                    u = 0.0
                elif u > 1.0:
                    u = 1.0
                tz = -hnom - dhip + gate * clear * u * u * (3.0 - 2.0 * u)
            pterm = -psg * qd[2]
            if pterm > 0.2:
                pterm = 0.2
            elif pterm < -0.2:
                pterm = -0.2
            # placement feedback steers where the foot lands, not where it
            # pushes: the correction tracks live through swing and freezes
            # at touchdown, else stance PD turns feedback wiggle into
            # horizontal shoves through the planted foot
            in_st = p < span
            if (not in_st) or not was_st[leg]:
                place[leg] = shift + pterm
            was_st[leg] = in_st
            tx += place[leg]
            # sqrt form rather than hypot: the compiled twin must round
            # identically, and C hypot is not bit-for-bit with Python's
            r = sqrt(tx * tx + tz * tz)
            if r > r_max:
                r = r_max
                ik_clamped += 1.0
            elif r < r_min:
                r = r_min
                ik_clamped += 1.0
            ck = (r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
            if ck > 1.0:
                ck = 1.0
            elif ck < -1.0:
                ck = -1.0
            qk = acos(ck)
            gt = atan2(tx, -tz)
            cpsi = (l1 * l1 + r * r - l2 * l2) / (2.0 * l1 * r)
            if cpsi > 1.0:
                cpsi = 1.0
            elif cpsi < -1.0:
                cpsi = -1.0
            psi = acos(cpsi)
            qdes2[2 * leg] = qdes1[2 * leg]
            qdes2[2 * leg + 1] = qdes1[2 * leg + 1]
            qdes1[2 * leg] = qdes[2 * leg]
            qdes1[2 * leg + 1] = qdes[2 * leg + 1]
            # leg posture held in world axes: subtracting pitch decouples leg
            # geometry from body attitude, so ground-force redistribution can
            # right the base instead of the servos tipping it further
            qdes[2 * leg] = gt + psi - q[2]
            qdes[2 * leg + 1] = qk
            # support feedforward at the measured pose: a pure position PD
            # sags under the stance load until the feet drift ahead of the
            # hips, which tips the body over the rear contact. Supplying the
            # static holding torque up front leaves the PD only deviations.
            tau_s_tick[leg] = _table_eval(
                tab_tau, tab_slope, tab_q0, tab_dq, q[4 + 2 * leg]
            )
            if kp > 0.0:
                fn = share[leg] * fn_des + (delta if leg == 0 else -delta)
                if fn < 0.0:
                    fn = 0.0
                fxw = l1 * sal[leg] + l2 * sbe[leg]
                # holding torques for an upward contact force fn at the foot,
                # plus the hip share of the unrealized righting moment
                ff[2 * leg] = -fxw * fn - share[leg] * m_resid
                # the knee actuator also offloads whatever the parallel
                # spring already supplies at this angle
                ff[2 * leg + 1] = l2 * sbe[leg] * fn - tau_s_tick[leg]
                # unloaded legs still weigh something: gravity compensation
                # fades in as the leg leaves support
                sw = 1.0 - planted[leg]
                ff[2 * leg] += sw * grav * (
                    (m_t * c1 + m_s * l1) * sal[leg] + m_s * c2 * sbe[leg]
                )
                ff[2 * leg + 1] -= sw * grav * m_s * c2 * sbe[leg]
            else:
                ff[2 * leg] = 0.0
                ff[2 * leg + 1] = 0.0
        if tick == 0:
            for j in range(4):
                qdes1[j] = qdes[j]
                qdes2[j] = qdes[j]
        for j in range(4):
            tau = kp * (qdes[j] - q[3 + j]) - kd * qd[3 + j] + ff[j]
            if kp > 0.0:
                # track the moving target: cancel the absolute damper along
                # it and add inertia times its acceleration, since the PD
                # alone is too slow for a sub-200 ms swing
                tau += kd * (qdes[j] - qdes1[j]) / dt_ctrl
                hj = 0.7 if j % 2 == 0 else 0.1
                aff = (
                    swff * hj * (qdes[j] - 2.0 * qdes1[j] + qdes2[j])
                    / (dt_ctrl * dt_ctrl)
                )
                if aff > 20.0:
                    aff = 20.0
                elif aff < -20.0:
                    aff = -20.0
                tau += aff
            if tau > tau_lim:
                tau = tau_lim
            elif tau < -tau_lim:
                tau = -tau_lim
            tau_cmd[j] = tau

        # ---- reward at tick start -----------------------------------------
        vx = qd[0]
        vz = qd[1]
        wp = qd[2]
        err = vx - cmd
        r_track = P[P_W_TRACK] * exp(-4.0 * err * err)
        r_stab = -P[P_W_STAB] * (vz * vz + wp * wp)
        sm = 0.0
        for j in range(4):
            d2 = qdes[j] - 2.0 * qdes1[j] + qdes2[j]
            sm += d2 * d2
        r_act = -P[P_W_ACT] * sm
        tq = 0.0
        for j in range(4):
            tq += tau_cmd[j] * tau_cmd[j]
        r_torque = -P[P_W_TORQUE] * tq
        ve = 0.0
        for j in range(4):
            e = fabs(qd[3 + j]) - vel_lim
            if e > 0.0:
                ve += e * e
        r_vel = -P[P_W_VEL] * ve
        r_slip = -P[P_W_SLIP] * slip_window
        reward = r_track + r_stab + r_act + r_torque + r_vel + r_slip

        # ---- contact probe and spring torque at tick start ----------------
        sp = sin(q[2])
        cp = cos(q[2])
        for leg in range(2):
            side = 1.0 if leg == 0 else -1.0
            hx = q[0] + cp * side * hip_x - sp * hip_z
            hz = q[1] + sp * side * hip_x + cp * hip_z
            al = q[2] + q[3 + 2 * leg]
            be = al - q[4 + 2 * leg]
            fx = hx + l1 * sin(al) + l2 * sin(be)
            fz = hz - l1 * cos(al) - l2 * cos(be)
            gap = fz - _terrain_height(terr_h, terr_x0, terr_dx, fx)
            trace[tick, T_CONTACT_F + leg] = 1.0 if gap < 0.0 else 0.0
            trace[tick, T_TAUS_F + leg] = tau_s_tick[leg]

        # ---- trace row -----------------------------------------------------
        trace[tick, T_X] = q[0]
        trace[tick, T_Z] = q[1]
        trace[tick, T_PITCH] = q[2]
        trace[tick, T_VX] = vx
        trace[tick, T_VZ] = vz
        trace[tick, T_PITCHRATE] = wp
        for j in range(4):
            trace[tick, T_Q_HF + j] = q[3 + j]
            trace[tick, T_QD_HF + j] = qd[3 + j]
            trace[tick, T_TAU_HF + j] = tau_cmd[j]
        trace[tick, T_CMD] = cmd
        trace[tick, T_REWARD] = reward
        trace[tick, T_R_TRACK] = r_track
        trace[tick, T_R_STAB] = r_stab
        trace[tick, T_R_ACT] = r_act
        trace[tick, T_R_TORQUE] = r_torque
        trace[tick, T_R_VEL] = r_vel
        trace[tick, T_R_SLIP] = r_slip
        trace[tick, T_SLIP_INC] = slip_window
        trace[tick, T_IK_CLAMPED] = ik_clamped
        ticks_done = tick + 1
        slip_window = 0.0

        # ---- physics substeps ----------------------------------------------
        for sub in range(decim):
            t = t_tick + sub * dt
            # advance the push pointer past expired pulses
            while push_i < n_push and t >= pushes[push_i, 1]:
                push_i += 1
            push_fx = 0.0
            push_fz = 0.0
            push_tau = 0.0
            if push_i < n_push and t >= pushes[push_i, 0]:
                push_fx = pushes[push_i, 2]
                push_fz = pushes[push_i, 3]
                push_tau = pushes[push_i, 4]

            sp = sin(q[2])
            cp = cos(q[2])
            x = q[0]
            z = q[1]
            vx = qd[0]
            vz = qd[1]
            wp = qd[2]

            for i in range(7):
                rhs[i] = 0.0
                for j in range(7):
                    M[i][j] = 0.0

            # base body: com at the base origin
            M[0][0] = m_b
            M[1][1] = m_b
            M[2][2] = i_b
            rhs[1] -= m_b * grav

            # actuator, spring, push generalized forces
            rhs[3] += tau_cmd[0]
            rhs[4] += tau_cmd[1]
            rhs[5] += tau_cmd[2]
            rhs[6] += tau_cmd[3]
            ts_f = _table_eval(tab_tau, tab_slope, tab_q0, tab_dq, q[4])
            ts_h = _table_eval(tab_tau, tab_slope, tab_q0, tab_dq, q[6])
            rhs[4] += ts_f
            rhs[6] += ts_h
            rhs[0] += push_fx
            rhs[1] += push_fz
            rhs[2] += push_tau

            for leg in range(2):
                side = 1.0 if leg == 0 else -1.0
                ih = 3 + 2 * leg
                ik = 4 + 2 * leg
                rx = cp * side * hip_x - sp * hip_z
                rz = sp * side * hip_x + cp * hip_z
                hx = x + rx
                hz = z + rz
                al = q[2] + q[ih]
                be = al - q[ik]
                sa = sin(al)
                ca = cos(al)
                sb = sin(be)
                cb = cos(be)
                ald = wp + qd[ih]
                bed = ald - qd[ik]

                knx = hx + l1 * sa
                knz = hz - l1 * ca
                # com positions
                ctx = hx + c1 * sa
                ctz = hz - c1 * ca
                csx = knx + c2 * sb
                csz = knz - c2 * cb

                # thigh com jacobian columns: pitch, hip; (x, z are 1)
                t2x = -(ctz - z)
                t2z = ctx - x
                t3x = -(ctz - hz)
                t3z = ctx - hx
                # shank com jacobian columns: pitch, hip, knee
                s2x = -(csz - z)
                s2z = csx - x
                s3x = -(csz - hz)
                s3z = csx - hx
                s4x = csz - knz
                s4z = -(csx - knx)

                # mass matrix accumulation, thigh then shank
                M[0][0] += m_t
                M[1][1] += m_t
                M[0][2] += m_t * t2x
                M[1][2] += m_t * t2z
                M[0][ih] += m_t * t3x
                M[1][ih] += m_t * t3z
                M[2][2] += m_t * (t2x * t2x + t2z * t2z) + i_t
                M[2][ih] += m_t * (t2x * t3x + t2z * t3z) + i_t
                M[ih][ih] += m_t * (t3x * t3x + t3z * t3z) + i_t

                M[0][0] += m_s
                M[1][1] += m_s
                M[0][2] += m_s * s2x
                M[1][2] += m_s * s2z
                M[0][ih] += m_s * s3x
                M[1][ih] += m_s * s3z
                M[0][ik] += m_s * s4x
                M[1][ik] += m_s * s4z
                M[2][2] += m_s * (s2x * s2x + s2z * s2z) + i_s
                M[2][ih] += m_s * (s2x * s3x + s2z * s3z) + i_s
                M[2][ik] += m_s * (s2x * s4x + s2z * s4z) - i_s
                M[ih][ih] += m_s * (s3x * s3x + s3z * s3z) + i_s
                M[ih][ik] += m_s * (s3x * s4x + s3z * s4z) - i_s
                M[ik][ik] += m_s * (s4x * s4x + s4z * s4z) + i_s

                # bias accelerations (qdd = 0): centripetal chain
                ahx = -rx * wp * wp
                ahz = -rz * wp * wp
                aknx = ahx - l1 * sa * ald * ald
                aknz = ahz + l1 * ca * ald * ald
                atx = ahx - c1 * sa * ald * ald
                atz = ahz + c1 * ca * ald * ald
                asx = aknx - c2 * sb * bed * bed
                asz = aknz + c2 * cb * bed * bed

                # h = J^T m (a + g); subtract from rhs
                fx_t = m_t * atx
                fz_t = m_t * (atz + grav)
                rhs[0] -= fx_t
                rhs[1] -= fz_t
                rhs[2] -= t2x * fx_t + t2z * fz_t
                rhs[ih] -= t3x * fx_t + t3z * fz_t
                fx_s = m_s * asx
                fz_s = m_s * (asz + grav)
                rhs[0] -= fx_s
                rhs[1] -= fz_s
                rhs[2] -= s2x * fx_s + s2z * fz_s
                rhs[ih] -= s3x * fx_s + s3z * fz_s
                rhs[ik] -= s4x * fx_s + s4z * fz_s

                # foot contact
                ftx = knx + l2 * sb
                ftz = knz - l2 * cb
                vhx = vx - rz * wp
                vhz = vz + rx * wp
                vfx = vhx + l1 * ca * ald + l2 * cb * bed
                vfz = vhz + l1 * sa * ald + l2 * sb * bed
                gap = ftz - _terrain_height(terr_h, terr_x0, terr_dx, ftx)
                if gap < 0.0:
                    fn = -kn * gap - dn * vfz
                    if fn > 0.0:
                        sat = vfx / vreg
                        if sat > 1.0:
                            sat = 1.0
                        elif sat < -1.0:
                            sat = -1.0
                        ft = -mu * fn * sat
                        ex = fabs(vfx) - vreg
                        if ex > 0.0:
                            slip_window += ex * dt
                            slip_total += ex * dt
                        f2x = -(ftz - z)
                        f2z = ftx - x
                        f3x = -(ftz - hz)
                        f3z = ftx - hx
                        f4x = ftz - knz
                        f4z = -(ftx - knx)
                        rhs[0] += ft
                        rhs[1] += fn
                        rhs[2] += f2x * ft + f2z * fn
                        rhs[ih] += f3x * ft + f3z * fn
                        rhs[ik] += f4x * ft + f4z * fn

            # symmetrize
            for i in range(7):
                for j in range(i + 1, 7):
                    M[j][i] = M[i][j]

            # Cholesky solve M acc = rhs
            ok = 1
            for i in range(7):
                for j in range(i + 1):
                    sm = M[i][j]
                    for k2 in range(j):
                        sm -= L[i][k2] * L[j][k2]
                    if i == j:
                        if sm <= 0.0:
                            ok = 0
                            break
                        L[i][i] = sqrt(sm)
                    else:
                        L[i][j] = sm / L[j][j]
                if ok == 0:
                    break
            if ok == 0:
                status = STATUS_BLOWUP
                break
            for i in range(7):
                sm = rhs[i]
                for k2 in range(i):
                    sm -= L[i][k2] * acc[k2]
                acc[i] = sm / L[i][i]
            for i in range(6, -1, -1):
                sm = acc[i]
                for k2 in range(i + 1, 7):
                    sm -= L[k2][i] * acc[k2]
                acc[i] = sm / L[i][i]

            # semi-implicit Euler
            bad = 0
            for i in range(7):
                qd[i] += acc[i] * dt
                q[i] += qd[i] * dt
                if not (fabs(q[i]) < blowup and fabs(qd[i]) < blowup):
                    bad = 1
            if bad:
                status = STATUS_BLOWUP
                break

            # actuator torque-square integral (ZOH over the window)
            torque_sq += tq * dt

            # joint limit / velocity recording
            viol = 0
            for j in range(4):
                if fabs(qd[3 + j]) > vel_lim:
                    viol = 1
            if q[3] < P[P_HIP_LO] or q[3] > P[P_HIP_HI]:
                viol = 1
            if q[5] < P[P_HIP_LO] or q[5] > P[P_HIP_HI]:
                viol = 1
            if q[4] < P[P_KNEE_LO] or q[4] > P[P_KNEE_HI]:
                viol = 1
            if q[6] < P[P_KNEE_LO] or q[6] > P[P_KNEE_HI]:
                viol = 1
            if viol:
                limit_viol += 1.0

            if q[1] < P[P_FALL_Z] or fabs(q[2]) > P[P_FALL_PITCH]:
                status = STATUS_FELL
                break
        if status != STATUS_OK:
            break

    agg[A_TICKS] = <double>ticks_done
    agg[A_STATUS] = <double>status
    agg[A_TORQUE_SQ_INT] = torque_sq
    agg[A_SLIP_TOTAL] = slip_total
    agg[A_LIMIT_VIOL] = limit_viol
    agg[A_END_TIME] = t + dt if status != STATUS_OK else n_ticks * dt_ctrl
    for i in range(7):
        agg[A_FINAL_Q + i] = q[i]
        agg[A_FINAL_QD + i] = qd[i]
    return status


def run_episode(
    const double[::1] P,
    const double[::1] q0,
    const double[::1] qd0,
    const double[::1] commands,
    const double[:, ::1] pushes,
    const double[::1] terr_h,
    double terr_x0,
    double terr_dx,
    const double[::1] tab_tau,
    const double[::1] tab_slope,
    double tab_q0,
    double tab_dq,
    double[:, ::1] trace,
    double[::1] agg,
):
    """Run one episode; fills `trace` rows and `agg`, returns a status code."""
    cdef int status
    with nogil:
        status = _run(
            P, q0, qd0, commands, pushes, terr_h, terr_x0, terr_dx,
            tab_tau, tab_slope, tab_q0, tab_dq, trace, agg,
        )
    return status
