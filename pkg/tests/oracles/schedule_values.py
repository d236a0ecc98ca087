"""Frozen oracle values; regenerate with gen_schedule_values.py."""

# (family, params, vp, t, tv_sq, snr_sq, a, b, f, g_sq)
SCHEDULE_VALUES = [
    ('SMLD', {}, False, 0, 1.0001, 9999.9999999999996, 1.0, 0.01, 0.0, 0.0017034386382832476),
    ('SMLD', {}, False, 0.3, 1.0165722700866999, 60.341763365451629, 1.0, 0.12873332935452238, 0.0, 0.28229845189750332),
    ('SMLD', {}, False, 0.5, 1.5, 2.0, 1.0, 0.70710678118654753, 0.0, 8.5171931914162376),
    ('SMLD', {}, False, 1, 2501.0, 4.0e-4, 1.0, 50.0, 0.0, 4.2585965957081187e+4),
    ('EDM', {}, False, 0.002, 1.000004, 2.5e+5, 1.0, 0.002, 0.0, 0.004),
    ('EDM', {}, False, 1, 2.0, 1.0, 1.0, 1.0, 0.0, 2.0),
    ('EDM', {}, False, 80, 6401.0, 1.5625e-4, 1.0, 80.0, 0.0, 160.0),
    ('EDM_UT', {}, False, 0, 1.000004, 2.4999999999999999e+5, 1.0, 0.002, -1.0691058840368783e-50, 1.9846330797388316e-4),
    ('EDM_UT', {}, False, 0.25, 1.0288159982608424, 34.702944904007849, 1.0, 0.16975275626876403, 0.0, 0.75807631302058458),
    ('EDM_UT', {}, False, 0.7, 154.30342767448502, 0.0065230113583848751, 1.0, 12.381576138540885, 0.0, 2185.2146770350648),
    ('EDM_UT', {}, False, 1, 6401.0, 1.5625e-4, 1.0, 80.0, 1.0691058840368783e-50, 6.9881636515882355e+4),
    ('OTFM', {}, False, 0.1, 0.82, 81.0, 0.9, 0.1, -1.1111111111111111, 0.22222222222222222),
    ('OTFM', {}, False, 0.5, 0.5, 1.0, 0.5, 0.5, -2.0, 2.0),
    ('OTFM', {}, False, 0.9, 0.82, 0.012345679012345679, 0.1, 0.9, -10.0, 18.0),
    ('OTFM', {'eta': 1.5, 'kappa': 0.5}, False, 0.3, 0.35293274491162894, 34.532246931905649, 0.58566201857385288, 0.09966315724292976, -2.1428571428571429, 0.14189635588041347),
    ('DDPM_LINEAR', {}, False, 0.01, 1.0, 500.75329908206916, 0.99900299733774645, 0.044643155244657057, -0.1495, 0.29900000000000001),
    ('DDPM_LINEAR', {}, False, 0.5, 1.0, 0.08585156444310038, 0.28118288079675238, 0.95965420206803625, -5.025, 10.05),
    ('DDPM_LINEAR', {}, False, 1, 1.0, 4.3187614149808491e-5, 0.006571586494929615, 0.99997840689233868, -10.0, 20.0),
    ('DDPM_COS', {}, False, 0.01, 1.0, 1583.0791219436199, 0.99968430937054248, 0.025125317875432343, -0.04372251311098488, 0.087445026221969759),
    ('DDPM_COS', {}, False, 0.5, 1.0, 0.9756738848186402, 0.70274005894116902, 0.71144670184024487, -1.5778789304876097, 3.1557578609752193),
    ('DDPM_COS', {}, False, 0.99, 1.0, 2.4291622189527556e-4, 0.015583877179155566, 0.99987856401268299, -99.991905230882326, 199.98381046176465),
    ('DDPM_COS', {'nu': 2.0}, False, 0.5, 1.0, 5.5364672687271705, 0.92033263623915062, 0.39113659848331154, -0.66261838649454983, 1.3252367729890997),
    ('SMLD', {}, True, 0.5, 1.0, 2.0, 0.81649658092772603, 0.57735026918962577, -2.8390643971387458, 5.6781287942774917),
    ('EDM_UT', {}, True, 0.5, 1.0, 0.158069615964456, 0.36945101619465209, 0.92925020668964014, -7.7279323872171331, 15.455864774434266),
    ('OTFM', {}, True, 0.25, 1.0, 9.0, 0.9486832980505138, 0.31622776601683793, -0.53333333333333333, 1.0666666666666667),
    ('OTFM', {}, True, 0.5, 1.0, 1.0, 0.70710678118654752, 0.70710678118654752, -2.0, 4.0),
    ('ISSNR', {}, True, 0, 1.0, 5.3511646847484666e+5, 0.9999990656252822, 0.0013670217856842991, -1.8498723144290707e-4, 3.6997446288581414e-4),
    ('ISSNR', {}, True, 0.3, 1.0, 286.18656343550468, 0.99825745323669067, 0.059008957433565435, -0.016127948787471693, 0.032255897574943385),
    ('ISSNR', {}, True, 0.5, 1.0, 54.598150033144241, 0.99096608924720953, 0.13411267636614951, -0.070505943051398904, 0.14101188610279781),
    ('ISSNR', {}, True, 1, 1.0, 0.0055706713634470296, 0.074429905935190432, 0.99722624770032939, -98.441513668730128, 196.88302733746026),
    ('ISSNR', {'eta': 2.0, 'kappa': -1.0}, True, 0.7, 1.0, 0.0049257051560549829, 0.070011152749087909, 0.99754620869949873, -9.21805495425863, 18.43610990851726),
]
