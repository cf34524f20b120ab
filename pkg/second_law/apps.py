from django.apps import AppConfig


class SecondLawConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'second_law'
    verbose_name = 'Second law'
