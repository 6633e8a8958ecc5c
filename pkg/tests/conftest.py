from hypothesis import HealthCheck, settings

settings.register_profile("leekh", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("leekh")

TREFOIL_RIGHT = "X(1,5,2,4) X(3,1,4,6) X(5,3,6,2)"
TREFOIL_LEFT = "X(4,1,5,2) X(2,5,3,6) X(6,3,1,4)"
FIGURE_EIGHT = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)"
