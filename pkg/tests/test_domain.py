import json
import math
import pytest
from dataclasses import replace
from imslab.domain import (
    DelayParams, NodeRole, SchemeId, SessionContext, QoSContext, RegistrationState, SessionState,
    ReservationState, OPERATING_POINT, FIELD_NAMES, link_delay, link_field,
)
from imslab.exceptions import UnknownPair, ParamFileError
from imslab.schemes import DEFAULT_SESSION


DEFINED_PAIRS = [
    (NodeRole.MN, NodeRole.OldAR),
    (NodeRole.MN, NodeRole.NewAR),
    (NodeRole.OldAR, NodeRole.NewAR),
    (NodeRole.MN, NodeRole.OldPCSCF),
    (NodeRole.MN, NodeRole.NewPCSCF),
    (NodeRole.OldPCSCF, NodeRole.NewPCSCF),
    (NodeRole.MN, NodeRole.HA),
    (NodeRole.OldPCSCF, NodeRole.SCSCF),
    (NodeRole.MN, NodeRole.CN),
    (NodeRole.HA, NodeRole.CN),
    (NodeRole.OldPCSCF, NodeRole.OldAR),
    (NodeRole.NewPCSCF, NodeRole.NewAR),
]


class TestLinkDelay:
    def test_mn_to_home_agent(self, operating_point):
        assert link_delay(operating_point, NodeRole.MN, NodeRole.HA) == 116

    def test_self_delay_is_zero(self):
        params = OPERATING_POINT.scaled(3)
        for role in NodeRole:
            assert link_delay(params, role, role) == 0

    def test_new_ar_defaults_to_old_ar_delay(self, operating_point):
        assert link_delay(operating_point, NodeRole.MN, NodeRole.NewAR) == 11

    @pytest.mark.parametrize('a, b', DEFINED_PAIRS)
    def test_symmetric(self, a, b):
        assert link_delay(OPERATING_POINT, a, b) == link_delay(OPERATING_POINT, b, a)
        assert link_field(a, b) == link_field(b, a)

    def test_undefined_pair(self, operating_point):
        with pytest.raises(UnknownPair):
            link_delay(operating_point, NodeRole.SCSCF, NodeRole.CN)
        with pytest.raises(UnknownPair):
            link_delay(operating_point, NodeRole.CN, NodeRole.SCSCF)

    def test_p_cscf_to_its_ar(self, operating_point):
        assert link_delay(operating_point, NodeRole.OldPCSCF, NodeRole.OldAR) == 5
        assert link_delay(operating_point.with_value('t_par', 8), NodeRole.NewAR, NodeRole.NewPCSCF) == 8


class TestDelayParams:
    def test_operating_point(self, operating_point):
        assert operating_point.t_nar == 11
        assert operating_point.t_np == 15
        assert operating_point.t_par == 5
        assert operating_point.t_hc == 114

    def test_explicit_values_beat_defaults(self):
        params = replace(OPERATING_POINT, t_nar=20, t_np=30)
        assert (params.t_nar, params.t_np) == (20, 30)

    @pytest.mark.parametrize('bad', [-1, math.nan, math.inf])
    def test_rejects_bad_delays(self, bad):
        with pytest.raises(ValueError):
            OPERATING_POINT.with_value('t_mc', bad)

    def test_rejects_non_numbers(self):
        with pytest.raises(TypeError):
            OPERATING_POINT.with_value('t_h', '116')

    def test_scaled(self):
        doubled = OPERATING_POINT.scaled(2)
        for name in FIELD_NAMES:
            assert getattr(doubled, name) == 2 * getattr(OPERATING_POINT, name)

    def test_from_json_defaults(self, params_file):
        assert DelayParams.from_json(params_file) == OPERATING_POINT

    def test_from_json_missing_field(self, tmp_path):
        path = tmp_path / 'short.json'
        path.write_text(json.dumps({'t_mr': 10, 't_oar': 11}))
        with pytest.raises(ParamFileError, match='missing'):
            DelayParams.from_json(path)

    def test_from_json_unknown_field(self, tmp_path):
        data = OPERATING_POINT.asdict()
        data['t_xyz'] = 1
        path = tmp_path / 'extra.json'
        path.write_text(json.dumps(data))
        with pytest.raises(ParamFileError, match='t_xyz'):
            DelayParams.from_json(path)

    def test_from_json_no_file(self, tmp_path):
        with pytest.raises(ParamFileError, match='not found'):
            DelayParams.from_json(tmp_path / 'nope.json')

    def test_from_json_bad_json(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"t_mr": ')
        with pytest.raises(ParamFileError):
            DelayParams.from_json(path)

    def test_shipped_parameter_file(self):
        from pathlib import Path
        shipped = Path(__file__).resolve().parent.parent / 'params' / 'operating_point.json'
        assert DelayParams.from_json(shipped) == OPERATING_POINT


class TestSessionContext:
    def test_equality_is_fieldwise(self):
        copy = replace(DEFAULT_SESSION)
        assert copy == DEFAULT_SESSION
        assert copy is not DEFAULT_SESSION

    @pytest.mark.parametrize('field_name, value', [
        ('registration_state', RegistrationState.Unregistered),
        ('session_state', SessionState.Terminated),
        ('final_network_entry_point', 'scscf.visited.example.net'),
        ('ue_address', '2001:db8:ff::1'),
        ('public_user_id', 'sip:bob@home.example.net'),
        ('private_user_id', 'bob@home.example.net'),
        ('access_network_type', 'UMTS'),
    ])
    def test_every_field_counts(self, field_name, value):
        assert replace(DEFAULT_SESSION, **{field_name: value}) != DEFAULT_SESSION

    def test_active_context_needs_every_field(self):
        with pytest.raises(ValueError, match='ue_address'):
            replace(DEFAULT_SESSION, ue_address='')

    def test_terminated_context_may_be_partial(self):
        ctx = replace(DEFAULT_SESSION, session_state=SessionState.Terminated, ue_address='')
        assert ctx.ue_address == ''


class TestQoSContext:
    def test_reserved_needs_approval(self):
        with pytest.raises(ValueError):
            QoSContext((('audio', 64),), approved=False, reservation_state=ReservationState.Reserved)

    def test_reserve(self):
        qos = QoSContext((('audio', 64),), approved=True, reservation_state=ReservationState.Requested)
        assert qos.reserve().reservation_state is ReservationState.Reserved
        assert qos.reserve().qos_proposal == (('audio', 64.0),)


class TestSchemeId:
    @pytest.mark.parametrize('name, scheme', [
        ('standard', SchemeId.Standard),
        ('qos-reactive', SchemeId.QosReactive),
        ('QosPredictive', SchemeId.QosPredictive),
    ])
    def test_parse(self, name, scheme):
        assert SchemeId.parse(name) is scheme

    def test_parse_unknown(self):
        with pytest.raises(ValueError):
            SchemeId.parse('proactive')
